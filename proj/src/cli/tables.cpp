#include "igo/cli/tables.hpp"

#include <ostream>

#include "igo/cli/experiment.hpp"
#include "igo/core/spec_string.hpp"
#include "igo/flow/flow.hpp"

namespace igo {

namespace {

struct Grid {
  double lo;
  double hi;
  Index points;

  double at(Index k) const {
    return points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
};

Grid read_grid(const SpecString& s, double lo, double hi, Index points) {
  Grid g{s.real("q_min", lo), s.real("q_max", hi), s.integer("points", points)};
  if (!(g.lo > 0.0 && g.hi < 1.0 && g.lo <= g.hi)) throw InvalidInput("table: need 0 < q_min <= q_max < 1");
  if (g.points < 1) throw InvalidInput("table: points must be positive");
  return g;
}

}  // namespace

void write_table(std::ostream& out, const std::string& spec) {
  const SpecString s = SpecString::parse(spec);
  if (s.kind == "critical_dt") {
    s.require_known({"q_min", "q_max", "points"});
    const Grid g = read_grid(s, 0.01, 0.6, 60);
    out << "# igo-csv v1 critical_dt\n";
    out << "q,j1,j2,j2_ladder\n";
    for (Index k = 0; k < g.points; ++k) {
      const double q = g.at(k);
      out << format_number(q) << ',' << format_number(critical_dt(q, 1.0)) << ','
          << format_number(critical_dt(q, 2.0)) << ',' << format_number(critical_dt_ladder(q, 2.0)) << '\n';
    }
  } else if (s.kind == "linear_constants") {
    s.require_known({"d", "q_min", "q_max", "points"});
    const Index d = s.integer("d", 2);
    if (d < 1) throw InvalidInput("table: d must be positive");
    const Grid g = read_grid(s, 0.05, 0.95, 19);
    out << "# igo-csv v1 linear_constants d=" << d << "\n";
    out << "q0,alpha,beta\n";
    for (Index k = 0; k < g.points; ++k) {
      const LinearFlowConstants c = gaussian_linear_constants(g.at(k), d);
      out << format_number(c.q0) << ',' << format_number(c.alpha) << ',' << format_number(c.beta) << '\n';
    }
  } else {
    throw InvalidInput("unknown table '" + s.kind + "' (expected critical_dt or linear_constants)");
  }
}

}  // namespace igo
