#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nfold/susy.hpp"
#include "nfold/typea.hpp"

namespace nfold {

/// Finite-difference discretization settings. Infinite sides of the domain
/// are truncated where V has risen `margin` times the requested energy
/// window above its minimum; a singular finite endpoint is cut at distance
/// `endpoint_cut`.
struct GridSpec {
  Domain dom{-Domain::inf, Domain::inf};
  int n = 4096;
  double margin = 5.0;
  double endpoint_cut = 1e-3;
  std::optional<double> truncation;  // fixed half-width about q0 instead of the margin rule
  bool richardson = true;
  std::uint64_t seed = 0;
};

enum class Normalizability { normalizable, not_normalizable, inconclusive };
const char* to_string(Normalizability v);

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending
  std::vector<std::vector<double>> eigenvectors;  // unit discrete L2 norm
  std::vector<double> grid;         // abscissae
  double h = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  Boundary boundary = Boundary::dirichlet;
  std::vector<double> richardson;   // extrapolated eigenvalues (empty if disabled)
  std::vector<double> error_estimate;
  /// Per level: eigenvector negligible at the truncation edges.
  std::vector<Normalizability> verdicts;
  std::vector<double> potential;    // V on the grid
};

/// Lowest k eigenvalues of -½∂² + V by second-order central differences.
/// Throws DomainError when V is not real on the grid or the requested levels
/// exceed the safe resolution of the grid.
SpectrumReport grid_spectrum(const Expr& V, const GridSpec& spec, int k);

struct MatchEntry {
  cplx root = 0.0;
  int level = -1;                 // index into the numeric spectrum, -1 if unmatched
  double numeric = 0.0;
  double difference = 0.0;
  std::string note;               // empty when matched
};

/// Greedy nearest, injective matching of algebraic roots to numeric levels.
std::vector<MatchEntry> match_spectra(const std::vector<cplx>& roots, const std::vector<double>& levels, double tol);

struct PairingResult {
  bool kernel_level = false;      // the level is an algebraic root; residuals not computed
  double energy = 0.0;
  double eigen_residual = 0.0;    // ‖(H⁺ - E) PΦ‖ / ‖PΦ‖
  double norm_residual = 0.0;     // |‖PΦ‖² - det M⁻(E)| / |det M⁻(E)|
  double norm_squared = 0.0;
  double detM = 0.0;
};

/// Maps the grid eigenvector of H⁻ through P using P ≡ r0 + r1 ∂ modulo the
/// eigen-equation and checks the partner eigen-equation and the norm
/// identity ‖PΦ‖² = det M⁻(E).
PairingResult pairing_check(const SuperSystem& sys, const SpectrumReport& report, const SMatrix& Sminus, int level,
                            double root_tol = 1e-5);

struct StateVerdict {
  Branch branch;
  int n;  // 1-based
  Normalizability verdict;
  std::string reason;
};

struct IndexReport {
  int index = 0;
  int normalizable_minus = 0;
  int normalizable_plus = 0;
  bool uncertain = false;
  std::vector<StateVerdict> states;
};

/// Square-integrability of f on dom from its tail/endpoint behavior and,
/// on compact pieces, boundedness.
Normalizability normalizability(const Expr& f, const Domain& dom, std::string* reason = nullptr);

/// Kernel-counting index n⁻ - n⁺ over the closed-form bases.
IndexReport witten_index(const TypeAModel& model);

}  // namespace nfold
