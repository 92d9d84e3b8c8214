#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfold/gscale.hpp"
#include "nfold/susy.hpp"
#include "nfold/typea.hpp"

namespace nfold {

enum class ModelKind { type_a, two_fold, custom };
const char* to_string(ModelKind k);

/// Grid settings read from a model file; unset values fall back to the
/// command-line flags or library defaults.
struct GridSettings {
  std::optional<int> n;
  std::optional<int> levels;
  std::optional<double> margin;
  std::optional<double> cut;
  std::optional<double> truncation;
};

struct FamilyBlock {
  std::string w;
  std::string e;
  std::optional<std::string> eta;
  std::vector<double> gs;
};

/// Parsed model file. Expression fields are stored parsed, with parameters
/// and N substituted.
struct ModelFile {
  std::string name;
  ModelKind kind = ModelKind::type_a;
  int N = 1;
  std::map<std::string, cplx> params;
  Domain dom{-Domain::inf, Domain::inf};
  GridSettings grid;

  // type A
  std::optional<Expr> W;
  std::optional<Expr> E;
  // two-fold
  std::optional<Expr> w1;
  cplx C = 0.0;
  // custom: V± and p-coefficients of P (index k multiplies p^k)
  std::optional<Expr> Vminus;
  std::optional<Expr> Vplus;
  std::vector<Expr> P;

  std::optional<FamilyBlock> family;

  /// Supercharge system for every kind.
  SuperSystem system() const;
  /// Throws ModelError unless kind is type A.
  TypeAModel type_a() const;
  /// Throws ModelError unless a family block is present.
  ScaledFamily scaled_family() const;
};

/// Parses the key = value model format:
///
///   # comment
///   name = harmonic
///   kind = typeA              (typeA | twofold | custom)
///   N = 3
///   param.omega = 1           (constants; may use N and earlier params)
///   W = omega*q               (typeA: W, E)
///   E = 0
///   w1 = 2*i*q                (twofold: w1, C)
///   C = -18*i
///   Vminus = ...              (custom: Vminus, Vplus, P.0 .. P.N-1, optional P.N = 1)
///   domain = -inf, inf
///   boundary = dirichlet      (dirichlet | periodic)
///   q0 = 0
///   singular = 0              (comma separated, may be empty)
///   grid.n = 4096             (grid.levels, grid.margin, grid.cut, grid.truncation)
///   family.w = x + x^3        (family.e, family.eta, family.g = comma list; variable x, coupling g)
///
/// Throws ModelSyntaxError on malformed lines or expressions and ModelError
/// when required fields are missing.
ModelFile parse_model_file(const std::string& text);
ModelFile load_model_file(const std::string& path);

}  // namespace nfold
