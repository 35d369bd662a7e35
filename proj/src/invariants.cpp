#include "gaussdaemon/invariants.hpp"

#include "gaussdaemon/daemonic.hpp"
#include "gaussdaemon/ergotropy.hpp"
#include "gaussdaemon/error.hpp"
#include "gaussdaemon/random_states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gaussdaemon {

namespace {

void record(InvariantCheck& check, std::size_t index, double excess, const std::string& what) {
  if (excess <= 0.0) return;
  if (check.violations++ == 0) {
    std::ostringstream os;
    os << "case " << index << ": " << what;
    check.first_failure = os.str();
  }
  check.worst = std::max(check.worst, excess);
}

std::size_t pick(RngStream& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Partition random_partition(std::size_t modes, RngStream& rng) {
  Partition p;
  const std::size_t b = pick(rng, 0, modes - 1);
  for (std::size_t j = 0; j < modes; ++j) {
    if (j != b) p.a_modes.push_back(j);
  }
  p.b_modes = {b};
  return p;
}

}  // namespace

bool InvariantReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.violations == 0; });
}

InvariantReport run_invariant_suite(std::size_t cases, std::uint64_t seed) {
  InvariantCheck sym;
  sym.name = "symplectic_invariance";
  InvariantCheck heis;
  heis.name = "heisenberg_validation";
  InvariantCheck indep;
  indep.name = "outcome_independence";
  InvariantCheck bound;
  bound.name = "daemonic_bound";

  for (std::size_t i = 0; i < cases; ++i) {
    RngStream rng = make_stream(seed, i);
    const std::size_t modes = pick(rng, 1, 3);

    {
      const GaussianState st = random_state(modes, rng);
      const Matrix s = random_symplectic(modes, rng);
      const auto before = symplectic_eigenvalues(st.cm()).values;
      const auto after = symplectic_eigenvalues(apply_symplectic(st, s).cm()).values;
      double excess = 0.0;
      for (std::size_t k = 0; k < before.size(); ++k) {
        excess = std::max(excess, std::abs(before[k] - after[k]) - 1e-8 * std::max(1.0, before[k]));
      }
      ++sym.cases;
      record(sym, i, excess, "symplectic eigenvalues moved under a symplectic map");
    }

    {
      const auto dim = static_cast<Eigen::Index>(2 * modes);
      const Matrix s = random_symplectic(modes, rng);
      Vector nu(dim);
      for (std::size_t j = 0; j < modes; ++j) {
        nu.segment<2>(static_cast<Eigen::Index>(2 * j)).setConstant(1.0 + 2.0 * std::uniform_real_distribution<>()(rng));
      }
      const Matrix good = symmetrized(s * nu.asDiagonal() * s.transpose());
      try {
        static_cast<void>(CovarianceMatrix(good));
      } catch (const Error& e) {
        record(heis, i, 1.0, std::string("physical CM rejected: ") + e.what());
      }
      const std::size_t bad_mode = pick(rng, 0, modes - 1);
      nu.segment<2>(static_cast<Eigen::Index>(2 * bad_mode))
          .setConstant(std::uniform_real_distribution<>(0.3, 0.95)(rng));
      const Matrix bad = symmetrized(s * nu.asDiagonal() * s.transpose());
      bool rejected = false;
      try {
        static_cast<void>(CovarianceMatrix(bad));
      } catch (const Error& e) {
        rejected = e.kind() == ErrorKind::Unphysical;
      }
      ++heis.cases;
      if (!rejected) record(heis, i, 1.0, "sub-vacuum Williamson form accepted");
    }

    const std::size_t cmodes = std::max<std::size_t>(2, modes);
    {
      const GaussianState st = random_state(cmodes, rng);
      const Partition part = random_partition(cmodes, rng);
      const GeneralDyneSetting set = random_setting(rng);
      const GaussianState c1 = condition(st, part, set, sample_outcome(st, part, set, rng));
      const GaussianState c2 = condition(st, part, set, sample_outcome(st, part, set, rng));
      const double scale = std::max(1.0, max_abs(c1.covariance()));
      ++indep.cases;
      record(indep, i, max_abs(c1.covariance() - c2.covariance()) - 1e-12 * scale,
             "conditional CM depends on the outcome");
    }

    {
      const GaussianState st = random_state(cmodes, rng);
      const Partition part = random_partition(cmodes, rng);
      const GeneralDyneSetting set = random_setting(rng);
      const double daemonic = daemonic_ergotropy(st, set, part).value;
      const double plain = ergotropy(reduce(st, part.a_modes)).ergotropy;
      ++bound.cases;
      record(bound, i, plain - daemonic - 1e-9, "daemonic ergotropy below the unconditional ergotropy");
    }
  }
  return InvariantReport{{sym, heis, indep, bound}};
}

}  // namespace gaussdaemon
