#include <cmath>
#include <iomanip>

#include "flexbill/lp.hpp"

namespace flexbill {

namespace {

void term(std::ostream& out, double coef, const std::string& name, bool first) {
  if (coef < 0) {
    out << " - ";
    coef = -coef;
  } else if (!first) {
    out << " + ";
  } else {
    out << " ";
  }
  if (coef != 1.0) out << coef << " ";
  out << name;
}

}  // namespace

void write_lp_format(const LpInstance& lp, std::ostream& out) {
  const auto& L = lp.layout;
  std::vector<std::string> names(lp.col_count());
  for (std::size_t c = 0; c < lp.col_count(); ++c) names[c] = L.name(c, lp.period_names);

  out << std::setprecision(17);
  out << "\\ monthly bill minimisation, " << lp.col_count() << " columns, " << lp.row_count()
      << " rows\n";
  out << "Minimize\n obj:";
  bool first = true;
  for (std::size_t c = 0; c < lp.col_count(); ++c) {
    if (lp.cost[c] == 0.0) continue;
    term(out, lp.cost[c], names[c], first);
    first = false;
    if (c % 8 == 7) out << "\n";
  }
  if (first) out << " 0 d_max";
  out << "\nSubject To\n";

  std::vector<std::size_t> per_tag(17, 0);
  for (std::size_t r = 0; r < lp.row_count(); ++r) {
    const auto tag = lp.row_tag[r];
    const std::string label = eq_label(tag) + "_" + std::to_string(per_tag[static_cast<int>(tag)]++);
    auto body = [&](const std::string& suffix) {
      out << " " << label << suffix << ":";
      for (std::size_t k = lp.row_start[r]; k < lp.row_start[r + 1]; ++k) {
        term(out, lp.row_value[k], names[static_cast<std::size_t>(lp.row_index[k])], k == lp.row_start[r]);
      }
    };
    const double lo = lp.row_lower[r];
    const double hi = lp.row_upper[r];
    if (lo == hi) {
      body("");
      out << " = " << lo << "\n";
    } else {
      if (std::isfinite(lo)) {
        body(std::isfinite(hi) ? "_lo" : "");
        out << " >= " << lo << "\n";
      }
      if (std::isfinite(hi)) {
        body(std::isfinite(lo) ? "_hi" : "");
        out << " <= " << hi << "\n";
      }
    }
  }

  out << "Bounds\n";
  for (std::size_t c = 0; c < lp.col_count(); ++c) {
    const double lo = lp.col_lower[c];
    const double hi = lp.col_upper[c];
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      out << " " << names[c] << " free\n";
    } else if (!std::isfinite(hi)) {
      if (lo != 0.0) out << " " << names[c] << " >= " << lo << "\n";
    } else if (!std::isfinite(lo)) {
      out << " -inf <= " << names[c] << " <= " << hi << "\n";
    } else {
      out << " " << lo << " <= " << names[c] << " <= " << hi << "\n";
    }
  }
  out << "End\n";
}

}  // namespace flexbill
