#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <set>
#include <string>

#include "snnarm/config.hpp"
#include "snnarm/errors.hpp"

using namespace snnarm;
using namespace snnarm::config;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

const char* kFull = R"(name: desk
output_dir: results/desk
scenario:
  n_targets: 5
  seed: 17
  training_cycles: 3
  eval_trials: 40
  step_limit: 900
  payload_mass_kg: 0.5
  ablation: freeze_after_training
  tol_frac: 0.01
  init_offset_rad: 0.2
  target_radius_min_frac: 0.35
  target_radius_max_frac: 0.85
arm:
  link_lengths_m: [0.9, 0.7]
  link_masses_kg: [1.8, 1.2]
  joint_friction_nms_per_rad: 0.25
  gravity_mps2: 9.5
  max_torque_nm: 80
  dt_s: 0.002
controller:
  kp_nm_per_rad: 150
  kd_nms_per_rad: 40
  input_mode: error
  q_bound_rad: 2.5
  dq_bound_radps: 4
  anti_windup: false
ensemble:
  n_neurons: 321
  mode: spiking
  learning_rate: 0.003
  tau_rc_s: 0.025
  tau_ref_s: 0.001
  tau_syn_s: 0.005
  max_rate_hz: [120, 180]
  intercepts: [-0.5, 0.8]
stats:
  resamples: 2500
  level: 0.9
)";

}  // namespace

TEST_CASE("every documented key is read") {
    const RunConfig c = parse_config(kFull);
    const auto& s = c.scenario;
    CHECK(c.name == "desk");
    CHECK(c.output_dir == "results/desk");
    CHECK(s.n_targets == 5);
    CHECK(s.seed == 17);
    CHECK(s.training_cycles == 3);
    CHECK(s.eval_trials == 40);
    CHECK(s.step_limit == 900);
    CHECK(s.payload_mass == 0.5);
    CHECK(s.ablation == harness::Ablation::freeze_after_training);
    CHECK(s.tol_frac == 0.01);
    CHECK(s.init_offset == 0.2);
    CHECK(s.target_min_frac == 0.35);
    CHECK(s.target_max_frac == 0.85);
    CHECK(s.arm.link_lengths == Eigen::Vector2d(0.9, 0.7));
    CHECK(s.arm.link_masses == Eigen::Vector2d(1.8, 1.2));
    // rod inertia about the centre of mass when not given
    CHECK(s.arm.link_inertias[0] == doctest::Approx(1.8 * 0.81 / 12.0));
    CHECK(s.arm.joint_friction == 0.25);
    CHECK(s.arm.gravity == 9.5);
    CHECK(s.arm.max_torque == 80.0);
    CHECK(s.arm.dt == 0.002);
    CHECK(s.controller.gains.kp == 150.0);
    CHECK(s.controller.gains.kd == 40.0);
    CHECK(s.controller.input_mode == control::InputMode::error);
    CHECK(s.controller.q_bound == 2.5);
    CHECK(s.controller.dq_bound == 4.0);
    CHECK_FALSE(s.controller.anti_windup);
    CHECK(s.ensemble.n_neurons == 321);
    CHECK(s.ensemble.mode == neuro::NeuronMode::spiking);
    CHECK(s.learning_rate == 0.003);
    CHECK(s.ensemble.lif.tau_rc == 0.025);
    CHECK(s.ensemble.lif.tau_ref == 0.001);
    CHECK(s.ensemble.lif.dt == 0.002);
    CHECK(s.ensemble.tau_syn == 0.005);
    CHECK(s.ensemble.max_rate_low == 120.0);
    CHECK(s.ensemble.max_rate_high == 180.0);
    CHECK(s.ensemble.intercept_low == -0.5);
    CHECK(s.ensemble.intercept_high == 0.8);
    CHECK(c.stats.resamples == 2500);
    CHECK(c.stats.level == 0.9);
    CHECK(c.sweep.empty());
}

TEST_CASE("an empty document gives the defaults") {
    const RunConfig c = parse_config("");
    const harness::ScenarioConfig d;
    CHECK(c.scenario.n_targets == d.n_targets);
    CHECK(c.scenario.step_limit == 2000);
    CHECK(c.scenario.training_cycles == 20);
    CHECK(c.scenario.eval_trials == 1000);
    CHECK(c.scenario.payload_mass == 1.0);
    CHECK(c.scenario.controller.gains.kp == 200.0);
    CHECK(c.scenario.controller.gains.kd == 10.0);
    CHECK(c.stats.resamples == 10000);
    CHECK(c.name == "run");
}

TEST_CASE("the resolved JSON parses back to the same configuration") {
    RunConfig c = parse_config(kFull);
    c.sweep.learning_rate = {0.1, 0.02};
    c.sweep.n_targets = {4, 5, 6};
    const std::string dumped = to_json(c).dump(2);
    const RunConfig back = parse_config(dumped);
    CHECK(to_json(back) == to_json(c));
    CHECK(back.scenario.arm.link_inertias == c.scenario.arm.link_inertias);
    CHECK(back.sweep.n_targets == c.sweep.n_targets);
}

TEST_CASE("errors carry the offending line") {
    CHECK(error_line("scenario:\n  n_targets: 6\n  n_tragets: 7\n") == 3);
    CHECK(error_line("scenario:\n  seed: 1\n  step_limit: lots\n") == 3);
    CHECK(error_line("name: ok\nbogus: 1\n") == 2);
    CHECK(error_line("ensemble:\n  mode: analog\n") == 2);
    CHECK(error_line("controller:\n  input_mode: sideways\n") == 2);
    CHECK(error_line("scenario:\n  ablation: partial\n") == 2);
    CHECK(error_line("ensemble:\n  max_rate_hz: [200, 100]\n") == 2);
    CHECK(error_line("sweep:\n  n_neurons: []\n") == 2);
    CHECK(error_line("scenario: [1, 2\n") > 0);
    CHECK(error_line("name: has space\n") == 1);
}

TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(parse_config("scenario:\n  n_targets: 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("scenario:\n  step_limit: 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("ensemble:\n  learning_rate: -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("arm:\n  link_lengths_m: [1, 1, 1]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("stats:\n  level: 1.5\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("sweep expansion") {
    RunConfig c = parse_config("scenario:\n  seed: 9\nsweep:\n  n_neurons: [2500, 5000, 10000]\n");
    auto cells = expand_sweep(c);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].config.scenario.ensemble.n_neurons == 2500);
    CHECK(cells[2].config.scenario.ensemble.n_neurons == 10000);
    CHECK(cells[1].config.name == "cell_001");
    CHECK(cells[1].config.sweep.empty());

    c = parse_config("sweep:\n  learning_rate: [1e-3, 1e-4, 5e-5, 1e-5]\n  n_targets: [4, 5, 6, 7, 8, 9]\n");
    cells = expand_sweep(c);
    CHECK(cells.size() == 24);
    CHECK(c.sweep.cell_count() == 24);
    std::set<std::uint64_t> seeds;
    for (const auto& cell : cells) seeds.insert(cell.config.scenario.seed);
    CHECK(seeds.size() == 24);
    CHECK(cells[7].config.scenario.learning_rate == 1e-4);
    CHECK(cells[7].config.scenario.n_targets == 5);

    const auto again = expand_sweep(c);
    for (std::size_t i = 0; i < cells.size(); ++i) CHECK(again[i].config.scenario.seed == cells[i].config.scenario.seed);

    c = parse_config("scenario:\n  seed: 12\nsweep:\n  learning_rate: [0.1, 0.01]\n  seeds: shared\n");
    cells = expand_sweep(c);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].config.scenario.seed == 12);
    CHECK(cells[1].config.scenario.seed == 12);
    CHECK(to_json(parse_config(to_json(c).dump()))["sweep"]["seeds"] == "shared");
    CHECK(error_line("sweep:\n  learning_rate: [0.1]\n  seeds: some\n") == 3);

    const RunConfig plain = parse_config("scenario:\n  seed: 3\n");
    CHECK(plain.sweep.empty());
    CHECK(expand_sweep(plain).size() == 1);
}

TEST_CASE("shipped configs load and expand to the documented grids") {
    const std::filesystem::path dir = SNNARM_CONFIG_DIR;
    const RunConfig desk = load_config(dir / "desk_6targets.yaml");
    const double k = desk.scenario.learning_rate;
    CHECK(desk.scenario.n_targets == 6);
    CHECK(desk.scenario.ensemble.n_neurons == 1000);
    CHECK(desk.scenario.ensemble.mode == neuro::NeuronMode::rate);
    CHECK(desk.scenario.training_cycles == 20);
    CHECK(desk.scenario.eval_trials == 200);

    const RunConfig freeze = load_config(dir / "desk_freeze.yaml");
    CHECK(freeze.scenario.ablation == harness::Ablation::freeze_after_training);
    CHECK(freeze.scenario.tol_frac == 0.005);
    CHECK(freeze.scenario.learning_rate == k);

    const RunConfig full = load_config(dir / "replication_9targets.yaml");
    CHECK(full.scenario.n_targets * full.scenario.training_cycles == 180);
    CHECK(full.scenario.eval_trials == 1000);
    CHECK(full.scenario.ensemble.n_neurons == 5000);
    CHECK(full.scenario.ensemble.mode == neuro::NeuronMode::spiking);
    CHECK(full.scenario.learning_rate == k);

    auto rates = [](const std::vector<SweepCell>& cells) {
        std::vector<double> r;
        for (const auto& c : cells) r.push_back(c.config.scenario.learning_rate);
        return r;
    };
    const auto desk_sweep = expand_sweep(load_config(dir / "desk_lr_sweep.yaml"));
    REQUIRE(desk_sweep.size() == 3);
    const auto dr = rates(desk_sweep);
    CHECK(dr[0] == doctest::Approx(20 * k));
    CHECK(dr[1] == doctest::Approx(k));
    CHECK(dr[2] == doctest::Approx(0.2 * k));
    for (const auto& c : desk_sweep) CHECK(c.config.scenario.seed == desk.scenario.seed);

    const auto lr = expand_sweep(load_config(dir / "lr_sweep.yaml"));
    REQUIRE(lr.size() == 4);
    const auto r = rates(lr);
    CHECK(r[0] == doctest::Approx(20 * k));
    CHECK(r[1] == doctest::Approx(2 * k));
    CHECK(r[2] == doctest::Approx(k));
    CHECK(r[3] == doctest::Approx(0.2 * k));

    const auto neurons = expand_sweep(load_config(dir / "neuron_sweep.yaml"));
    REQUIRE(neurons.size() == 3);
    CHECK(neurons[0].config.scenario.ensemble.n_neurons == 2500);
    CHECK(neurons[1].config.scenario.ensemble.n_neurons == 5000);
    CHECK(neurons[2].config.scenario.ensemble.n_neurons == 10000);

    const auto targets = expand_sweep(load_config(dir / "target_sweep.yaml"));
    REQUIRE(targets.size() == 6);
    for (std::size_t i = 0; i < targets.size(); ++i) CHECK(targets[i].config.scenario.n_targets == 4 + i);
}
