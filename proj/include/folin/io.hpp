#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "folin/gfol.hpp"
#include "folin/lti.hpp"
#include "folin/sim.hpp"
#include "folin/system.hpp"

namespace folin {

/// A system file after loading. Nonlinear files with a steady state are shifted
/// to deviation coordinates; `origin` maps back: raw = model state + origin.
struct LoadedSystem {
  SystemModel model;
  std::optional<LTISystem> linear;
  Eigen::VectorXd origin;
};

LoadedSystem parse_system(const std::string& json_text);
LoadedSystem load_system(const std::string& path);

/// Observer file: kind "lti" or "general". General specs are checked against `system`.
AnyObserver parse_observer(const std::string& json_text, const SystemModel& system);
AnyObserver load_observer(const std::string& path, const SystemModel& system);

std::string observer_to_json(const ObserverLTI& observer);
std::string observer_to_json(const GeneralSpec& spec);

/// Scenario file. x0 is in raw coordinates; it is shifted by `origin`.
struct Scenario {
  Eigen::VectorXd x0;
  std::optional<Eigen::VectorXd> xi0;
  Eigen::VectorXd init_error;  // empty: none
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<int> stride;
};

Scenario parse_scenario(const std::string& json_text, const LoadedSystem& system);
Scenario load_scenario(const std::string& path, const LoadedSystem& system);

/// Comma-separated roots; each either a real number or re+imj / re-imj.
std::vector<std::complex<double>> parse_roots(const std::string& text);
/// Comma-separated reals.
Eigen::VectorXd parse_vector(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace folin
