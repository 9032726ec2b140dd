#pragma once

namespace tauforge::embedded {

extern const char* const kE7OperatorJson;
extern const char* const kE7OperatorAdjudicatedJson;

}  // namespace tauforge::embedded
