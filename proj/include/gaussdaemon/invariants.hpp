#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gaussdaemon {

struct InvariantCheck {
  std::string name;
  std::size_t cases = 0;
  std::size_t violations = 0;
  /// Largest violation magnitude seen (0 when clean).
  double worst = 0.0;
  std::string first_failure;
};

struct InvariantReport {
  std::vector<InvariantCheck> checks;
  bool ok() const;
};

/// Randomized property checks, each over `cases` draws from substreams of `seed`:
///   symplectic_invariance   nu(S sigma S^T) = nu(sigma)
///   heisenberg_validation   physical CMs accepted, sub-vacuum Williamson forms rejected
///   outcome_independence    conditional CM identical for different outcomes
///   daemonic_bound          daemonic ergotropy >= ergotropy of the marginal
InvariantReport run_invariant_suite(std::size_t cases, std::uint64_t seed);

}  // namespace gaussdaemon
