#pragma once

#include <string>
#include <vector>

#include "folin/system.hpp"

inline folin::SystemModel make_model(std::vector<std::string> states, const std::vector<std::string>& f,
                                     const std::vector<std::string>& h, const std::string& q, double half_width = 1.0,
                                     folin::SystemModel::Parameters params = {}) {
  std::vector<folin::Expr> fe, he;
  for (const auto& s : f) fe.push_back(folin::parse(s));
  for (const auto& s : h) he.push_back(folin::parse(s));
  const auto n = static_cast<Eigen::Index>(states.size());
  folin::Box box(Eigen::VectorXd::Constant(n, -half_width), Eigen::VectorXd::Constant(n, half_width));
  return folin::SystemModel(std::move(states), std::move(params), std::move(fe), std::move(he), folin::parse(q), box);
}

inline folin::SystemModel example75() {
  return make_model({"x1", "x2", "x3"}, {"-x1 - x3^6", "sin(x1^2) - x3^2 - x2", "-x3 + x1*x2 - 1/(1 + x3^2)"},
                    {"x3^2"}, "x1 + x3^4");
}
