#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "adiabatic/lab/random_model.hpp"
#include "adiabatic/nstate.hpp"
#include "commands.hpp"

namespace adiabatic::lab {
namespace {

using namespace nstate;
namespace m = method;

NStateParams resolve_params(const CommandOptions& o) {
  if (o.model_path.empty()) throw DomainError("n-state: --model FILE is required");
  const auto mf = load_model(o.model_path);
  const auto* np = std::get_if<NStateParams>(&mf);
  if (!np) throw ModelFileError(o.model_path + ": expected kind \"n-state\"");
  NStateParams p = *np;
  if (o.x) p.x = *o.x;
  if (o.eps) p.eps = *o.eps;
  return p;
}

std::vector<Column> vector_columns(const std::string& prefix, std::size_t n, const char* method) {
  std::vector<Column> cols;
  for (std::size_t k = 0; k < n; ++k) {
    cols.push_back({"re_" + prefix + std::to_string(k), method});
    cols.push_back({"im_" + prefix + std::to_string(k), method});
  }
  return cols;
}

void append_vector(std::vector<double>& row, const cvec& v) {
  for (const auto& z : v) {
    row.push_back(z.real());
    row.push_back(z.imag());
  }
}

RunReport cmd_dyson(const NStateModel& mdl, const CommandOptions& o) {
  RunReport r;
  auto& t = r.table("dyson2", {{"t", m::kParam},
                               {"k", m::kParam},
                               {"re_order1", m::kDyson},
                               {"im_order1", m::kDyson},
                               {"re_order2", m::kDyson},
                               {"im_order2", m::kDyson},
                               {"re_value", m::kDyson},
                               {"im_value", m::kDyson}});
  for (double tt : o.times) {
    const auto d = dyson2(mdl, tt);
    for (std::size_t k = 0; k < mdl.dim(); ++k) {
      t.add_row({tt, static_cast<double>(k), d.order1[k].real(), d.order1[k].imag(), d.order2[k].real(),
                 d.order2[k].imag(), d.value[k].real(), d.value[k].imag()});
    }
  }
  r.notes.push_back("global factor exp(-i E0 t) omitted, E0 = " + format_double(mdl.energies()[mdl.ground_index()]));
  return r;
}

RunReport cmd_recursion(const NStateModel& mdl, const CommandOptions& o) {
  RunReport r;
  r.parameters["order"] = o.order;
  r.parameters["jet_order"] = o.jet_order;
  const auto rs = rs_recursion(mdl, o.order, o.jet_order);
  std::vector<Column> xi_cols{{"n", m::kParam}};
  for (std::size_t j = 0; j <= o.jet_order; ++j) {
    xi_cols.push_back({"re_xi_c" + std::to_string(j), m::kPhase});
    xi_cols.push_back({"im_xi_c" + std::to_string(j), m::kPhase});
  }
  auto& xt = r.table("xi", xi_cols);
  for (std::size_t n = 1; n <= rs.order(); ++n) {
    std::vector<double> row{static_cast<double>(n)};
    for (const auto& c : rs.xi_n(n).coeffs()) {
      row.push_back(c.real());
      row.push_back(c.imag());
    }
    xt.add_row(std::move(row));
  }
  std::vector<Column> phi_cols{{"n", m::kParam}};
  for (const auto& c : vector_columns("phi_", mdl.dim(), m::kPhase)) phi_cols.push_back(c);
  auto& pt = r.table("phi_eps0", phi_cols);
  for (std::size_t n = 1; n <= rs.order(); ++n) {
    std::vector<double> row{static_cast<double>(n)};
    append_vector(row, rs.phi_n(n));
    pt.add_row(std::move(row));
  }
  r.notes.push_back("xi_c<j> is the eps^j Taylor coefficient at eps = 0");
  r.notes.push_back(
      "sign: xi_2 = <0|V|phi_1> = -sum_n |V_n0|^2 / ((E_n - E0) - i eps); the leading minus follows from "
      "phi_1 = -R_1 Q V|0> and is negative for a ground level");
  return r;
}

void add_split_table(RunReport& r, const GSplit& s) {
  auto& t = r.table("g_split", {{"g_a", m::kPhase},
                                {"delta_e", m::kPhase},
                                {"g_b", m::kPhase},
                                {"g_b_phase", m::kPhase},
                                {"order", m::kParam},
                                {"last_term_magnitude", m::kPhase},
                                {"max_imag_residue", m::kResidual}});
  t.add_row({s.g_a, s.delta_e, s.g_b, s.g_b_phase, static_cast<double>(s.order), s.last_term_magnitude,
             s.max_imag_residue});
}

RunReport cmd_split(const NStateModel& mdl, const CommandOptions& o) {
  RunReport r;
  r.parameters["order"] = o.order;
  r.parameters["jet_order"] = o.jet_order;
  add_split_table(r, g_split(mdl, o.order, o.jet_order));
  return r;
}

RunReport cmd_assemble(const NStateModel& mdl, const CommandOptions& o) {
  RunReport r;
  r.parameters["order"] = o.order;
  const auto as = assemble_state(mdl, o.order);
  auto& t = r.table("state", {{"k", m::kParam}, {"re", m::kPhase}, {"im", m::kPhase}});
  for (std::size_t k = 0; k < as.state.size(); ++k) t.add_row({static_cast<double>(k), as.state[k].real(), as.state[k].imag()});
  add_split_table(r, as.split);
  auto& n = r.table("norm", {{"norm", m::kPhase}});
  n.add_row({numkit::norm2(as.state)});
  r.notes.push_back("divergent factor exp(-i g_a / eps) and phase exp(-i (E0 + delta_e) t) not applied");
  return r;
}

RunReport cmd_evolve(const NStateModel& mdl, const CommandOptions& o) {
  RunReport r;
  r.parameters["t_end"] = o.t_end;
  r.parameters["tol"] = o.tol;
  r.parameters["start_threshold"] = o.start_threshold;
  const auto traj = evolve_nstate(mdl, o.t_end, o.tol, o.start_threshold, true, o.max_steps);
  std::vector<Column> cols{{"t", m::kParam}};
  for (const auto& c : vector_columns("psi", mdl.dim(), m::kOde)) cols.push_back(c);
  cols.push_back({"norm", m::kOde});
  auto& t = r.table("trajectory", cols);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i]};
    append_vector(row, traj.states[i]);
    row.push_back(numkit::norm2(traj.states[i]));
    t.add_row(std::move(row));
  }
  r.notes.push_back("accepted_steps=" + std::to_string(traj.accepted_steps) +
                    " rejected_steps=" + std::to_string(traj.rejected_steps));
  return r;
}

RunReport cmd_oracle(const NStateModel& mdl) {
  RunReport r;
  const auto os = oracle_shift_detail(mdl);
  auto& t = r.table("oracle", {{"shift", m::kOracle},
                               {"eigenvalue", m::kOracle},
                               {"overlap", m::kOracle},
                               {"index", m::kOracle}});
  t.add_row({os.shift, os.eigenvalue, os.overlap, static_cast<double>(os.index)});
  return r;
}

RunReport cmd_compare(const NStateModel& mdl, const CommandOptions& o) {
  RunReport r;
  r.parameters["order"] = o.order;
  r.parameters["eps_grid"] = o.eps_grid;
  r.parameters["tol"] = o.tol;
  const auto split = g_split(mdl, o.order, o.jet_order);
  const double oracle = oracle_shift(mdl);
  auto& s = r.table("shift", {{"delta_e_series", m::kPhase}, {"delta_e_oracle", m::kOracle}, {"residual", m::kResidual}});
  s.add_row({split.delta_e, oracle, std::abs(split.delta_e - oracle)});

  const auto target = assemble_state(mdl, o.order).state;
  const std::size_t g = mdl.ground_index();
  const auto grid = parse_eps_grid(o.eps_grid).values();
  std::vector<std::future<cvec>> jobs;
  for (double e : grid) {
    jobs.push_back(std::async(std::launch::async, [&, e] {
      return evolve_nstate(mdl.with_eps(e), 0.0, o.tol, o.start_threshold, false, o.max_steps).final_state();
    }));
  }
  auto& t = r.table("ratios", {{"eps", m::kParam},
                               {"k", m::kParam},
                               {"ode_ratio", m::kOde},
                               {"recursion_ratio", m::kPhase},
                               {"residual", m::kResidual}});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto psi = jobs[i].get();
    for (std::size_t k = 0; k < mdl.dim(); ++k) {
      if (k == g) continue;
      const double ode = std::abs(psi[k] / psi[g]);
      const double rec = std::abs(target[k] / target[g]);
      t.add_row({grid[i], static_cast<double>(k), ode, rec, std::abs(ode - rec)});
    }
  }
  return r;
}

}  // namespace

std::string generate_model_text(const CommandOptions& o) {
  RandomModelSpec spec;
  spec.seed = o.seed;
  spec.levels = o.levels;
  spec.gap = o.gap;
  spec.vscale = o.vscale;
  if (o.x) spec.x = *o.x;
  if (o.eps) spec.eps = *o.eps;
  if (spec.levels < 1) throw DomainError("gen: --levels must be >= 1");
  if (!(spec.gap > 0.0)) throw DomainError("gen: --gap must be > 0");
  const auto d = random_model_data(spec);
  NStateParams p{d.energies, d.v_real, d.v_imag, spec.x, spec.eps, 0};
  (void)p.model();
  return to_json(ModelFile{p}).dump(2) + "\n";
}

RunReport run_n_state(const std::string& sub, const CommandOptions& o) {
  const auto params = resolve_params(o);
  const auto mdl = params.model();
  spdlog::debug("n-state {}: {} levels, x={} eps={}", sub, mdl.dim(), mdl.x(), mdl.eps());
  RunReport r;
  if (sub == "dyson") {
    r = cmd_dyson(mdl, o);
  } else if (sub == "recursion") {
    r = cmd_recursion(mdl, o);
  } else if (sub == "split") {
    r = cmd_split(mdl, o);
  } else if (sub == "assemble") {
    r = cmd_assemble(mdl, o);
  } else if (sub == "evolve") {
    r = cmd_evolve(mdl, o);
  } else if (sub == "oracle") {
    r = cmd_oracle(mdl);
  } else if (sub == "compare") {
    r = cmd_compare(mdl, o);
  } else {
    throw ContractError("n-state: unknown subcommand '" + sub + "'");
  }
  r.command = o.command_line;
  auto extra = std::move(r.parameters);
  r.parameters = nlohmann::ordered_json::object();
  r.parameters["model"] = o.model_path;
  r.parameters["levels"] = mdl.dim();
  r.parameters["x"] = mdl.x();
  r.parameters["eps"] = mdl.eps();
  r.parameters["ground_index"] = mdl.ground_index();
  for (auto& [k, v] : extra.items()) r.parameters[k] = v;
  return r;
}

}  // namespace adiabatic::lab
