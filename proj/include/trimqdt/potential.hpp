#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "trimqdt/geom.hpp"

namespace trimqdt {

/// Three-body potential energy surface in hartree.
class PotentialSurface {
 public:
  virtual ~PotentialSurface() = default;
  virtual double evaluate(const geom::InterparticleDistances& d) const = 0;
  virtual std::string name() const = 0;
  double at(const geom::HyperPoint& p) const { return evaluate(geom::to_interparticle(p)); }
  /// Hyperradius interval where the surface is defined.
  virtual double R_min() const { return 0.5; }
  virtual double R_max() const { return 20.0; }
};

/// Wraps a callable; used for models and tests.
class FunctionSurface : public PotentialSurface {
 public:
  using Fn = std::function<double(const geom::InterparticleDistances&)>;
  FunctionSurface(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  double evaluate(const geom::InterparticleDistances& d) const override { return fn_(d); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

/// Symmetric polynomial in Morse variables y_i = 1 - exp(-beta (r_i - r_ref)):
/// V = sum c * Sa^a * (Sx^2 + Sy^2)^b * (Sx^3 - 3 Sx Sy^2)^e, with
/// Sa = (y1+y2+y3)/sqrt3, Sx = (2 y3 - y1 - y2)/sqrt6, Sy = (y1 - y2)/sqrt2.
class ExpansionSurface : public PotentialSurface {
 public:
  struct Term {
    int a = 0;
    int b = 0;
    int e = 0;
    double c = 0.0;
  };
  ExpansionSurface(std::string name, double beta, double r_ref, double v0, std::vector<Term> terms);
  double evaluate(const geom::InterparticleDistances& d) const override;
  std::string name() const override { return name_; }
  double beta() const { return beta_; }
  double r_ref() const { return r_ref_; }
  double offset() const { return v0_; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::string name_;
  double beta_;
  double r_ref_;
  double v0_;
  std::vector<Term> terms_;
};

/// Tabulated surface on a tensor grid in (R, theta, phi), trilinear
/// interpolation with phi periodic. Rows given as distances are mapped through
/// all six relabelings to fill the phi circle.
class GridSurface : public PotentialSurface {
 public:
  struct Row {
    double r12, r23, r31, energy;
  };
  GridSurface(std::string name, const std::vector<Row>& rows);
  double evaluate(const geom::InterparticleDistances& d) const override;
  std::string name() const override { return name_; }
  const std::vector<double>& R() const { return R_; }
  const std::vector<double>& theta() const { return th_; }
  const std::vector<double>& phi() const { return ph_; }
  double R_min() const override { return R_.front(); }
  double R_max() const override { return R_.back(); }

 private:
  std::string name_;
  std::vector<double> R_, th_, ph_;
  std::vector<double> v_;  // [iR][ith][iph]
};

/// Reads "# name = ...", "# format = grid|expansion" and the body. Throws
/// std::runtime_error with the file position on malformed input or NaN.
std::unique_ptr<PotentialSurface> load_surface(const std::string& path);

/// Largest |V(perm d) - V(d)| over the six relabelings of `samples` random
/// triangles (fixed seed), relative to max(1, |V|).
double symmetry_violation(const PotentialSurface& v, int samples = 100, unsigned seed = 12345);

/// Bundled toy surface: the same expansion as data/toy_pes.txt.
std::unique_ptr<ExpansionSurface> toy_surface();

}  // namespace trimqdt
