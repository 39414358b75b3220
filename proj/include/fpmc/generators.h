#pragma once

#include <string>

namespace fpmc {

/// Hub with `services` service chains of length 3, each started only when
/// its feature is enabled; absorbing `failure` and `done` states.
/// 3·n + 3 states, 2^n products.
std::string generate_service_provider(unsigned services);

/// Chain of `stages` degradation states between `ok` and the absorbing
/// `worn_out` state, plus an absorbing `broken` state; feature f_i sets the
/// forward/break/recover probabilities of stage i. n + 3 states, 2^n products.
std::string generate_failure_recovery(unsigned stages);

}  // namespace fpmc
