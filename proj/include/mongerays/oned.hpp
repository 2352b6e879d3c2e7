#pragma once

#include <optional>
#include <vector>

#include "mongerays/mmspace.hpp"

namespace mongerays {

// Mass at coordinate t on a ray, tagged with the point of the space it stands for.
struct Atom1D {
  double t = 0.0;
  PointIndex point = 0;
  double mass = 0.0;
};

using Measure1D = std::vector<Atom1D>;

struct CouplingPiece {
  double s = 0.0;
  PointIndex x = 0;
  double t = 0.0;
  PointIndex y = 0;
  double mass = 0.0;
};

struct Coupling1D {
  std::vector<CouplingPiece> pieces;  // sorted by source then target coordinate
  // One piece per source atom; present only when no source atom is split.
  std::optional<std::vector<CouplingPiece>> map_form;
  double split_mass = 0.0;  // total mass of source atoms sent to more than one target
  double cost = 0.0;
};

// H(s) = mass strictly below s (left-continuous).
double cdf(const Measure1D& measure, double s);

// Sorts atoms by (t, point) and merges atoms that share both.
Measure1D canonical(Measure1D measure);

// Quantile coupling: both supports swept in increasing order, mass matched greedily.
Coupling1D monotone_rearrangement(const Measure1D& mu0, const Measure1D& mu1);

double cost_1d(const Coupling1D& coupling);

// s < s' implies t <= t' over all pieces with positive mass.
bool is_monotone(const Coupling1D& coupling);

}  // namespace mongerays
