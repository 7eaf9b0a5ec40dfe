// Command-line front end. Talks to the shared library exclusively through
// the C API in torsionflow/torsionflow.h.
//
// Exit codes: 0 success (blow-up and domain exit are results, not failures),
// 1 input error, 2 integrator failure, 3 verification failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torsionflow/torsionflow.h"

using nlohmann::json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitIntegrator = 2;
constexpr int kExitVerify = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContactHandle {
  tf_contact* ptr = nullptr;
  ~ContactHandle() { tf_contact_free(ptr); }
};

[[noreturn]] void die_input(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(kExitInput);
}

void check(tf_status status, int exit_code = kExitInput) {
  if (status == TF_OK) return;
  std::cerr << "error: " << tf_last_error() << "\n";
  std::exit(status == TF_ERR_INTERNAL ? kExitIntegrator : exit_code);
}

// Source selection shared by every command: either --preset/--K or an input
// JSON document with "preset", "structure_constants" or "raw_constants",
// plus an optional "initial" state.
struct SourceOptions {
  std::string input_file;
  std::string preset_name;
  double K = 0.0;

  std::optional<double> a0, c0, b0, phi0, tau0;

  void attach(CLI::App* cmd) {
    cmd->add_option("-i,--input", input_file, "JSON input document");
    cmd->add_option("--preset", preset_name,
                    "preset name (pdq, prequant, heisenberg, rossi, su2, sl2_hyperbolic)");
    cmd->add_option("--K", K, "preset parameter (K for pdq/prequant, t for rossi)");
    cmd->add_option("--a0", a0, "initial a");
    cmd->add_option("--c0", c0, "initial c");
    cmd->add_option("--b0", b0, "initial b (state carries B = b^2)");
    cmd->add_option("--phi0", phi0, "initial potential phi");
    cmd->add_option("--tau0", tau0, "initial scale tau");
  }

  void resolve(ContactHandle& contact, tf_state& state) const {
    state = tf_state{0.0, 1.0, 1.0, 0.0, 0.0, 0, 0};
    bool have_source = false;

    if (!input_file.empty()) {
      std::ifstream in(input_file);
      if (!in) throw InputError("cannot read input file '" + input_file + "'");
      json doc;
      try {
        in >> doc;
      } catch (const json::exception& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
      }
      if (doc.contains("preset")) {
        const json& p = doc["preset"];
        std::string name = p.at("name").get<std::string>();
        double param = p.value("K", 0.0);
        check(tf_contact_preset(name.c_str(), param, &contact.ptr, &state));
        have_source = true;
      } else if (doc.contains("structure_constants")) {
        const json& c = doc["structure_constants"];
        check(tf_contact_normalized(c.value("c2_13", 0.0), c.value("c2_23", 0.0),
                                    c.value("c3_12", 0.0), c.value("c3_23", 0.0),
                                    &contact.ptr));
        have_source = true;
      } else if (doc.contains("raw_constants")) {
        std::vector<double> raw = doc["raw_constants"].get<std::vector<double>>();
        if (raw.size() != 27)
          throw InputError("raw_constants must hold 27 entries c[i][j][k]");
        double theta[3] = {1.0, 0.0, 0.0};
        if (doc.contains("theta")) {
          std::vector<double> th = doc["theta"].get<std::vector<double>>();
          if (th.size() != 3) throw InputError("theta must hold 3 coefficients");
          for (int i = 0; i < 3; ++i) theta[i] = th[i];
        }
        check(tf_contact_raw(raw.data(), theta, &contact.ptr));
        have_source = true;
      }
      if (!have_source)
        throw InputError("input document needs one of preset / structure_constants / "
                         "raw_constants");
      if (doc.contains("initial")) {
        const json& init = doc["initial"];
        if (init.contains("a")) state.a = init["a"].get<double>();
        if (init.contains("c")) state.c = init["c"].get<double>();
        if (init.contains("B")) state.B = init["B"].get<double>();
        if (init.contains("phi")) {
          state.phi = init["phi"].get<double>();
          state.has_phi = 1;
        }
        if (init.contains("tau")) {
          state.tau = init["tau"].get<double>();
          state.has_tau = 1;
        }
      }
    }

    if (!preset_name.empty()) {
      if (have_source) throw InputError("give either --preset or --input, not both");
      check(tf_contact_preset(preset_name.c_str(), K, &contact.ptr, &state));
      have_source = true;
    }
    if (!have_source) throw InputError("no input: use --preset NAME or --input FILE");

    if (a0) state.a = *a0;
    if (c0) state.c = *c0;
    if (b0) state.B = (*b0) * (*b0);
    if (phi0) {
      state.phi = *phi0;
      state.has_phi = 1;
    }
    if (tau0) {
      state.tau = *tau0;
      state.has_tau = 1;
    }
  }
};

tf_flow_kind parse_kind(const std::string& kind) {
  if (kind == "unnormalized") return TF_FLOW_UNNORMALIZED;
  if (kind == "normalized") return TF_FLOW_NORMALIZED;
  if (kind == "f") return TF_FLOW_COUPLED_F;
  if (kind == "wplus") return TF_FLOW_COUPLED_W_PLUS;
  if (kind == "wminus") return TF_FLOW_COUPLED_W_MINUS;
  throw InputError("unknown flow kind '" + kind +
                   "' (unnormalized|normalized|f|wplus|wminus)");
}

std::pair<double, double> parse_range(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("range must look like LO:HI");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InputError("cannot parse range '" + text + "'");
  }
}

std::pair<int, int> parse_grid(const std::string& text) {
  auto x = text.find('x');
  if (x == std::string::npos) throw InputError("grid must look like NxM");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw InputError("cannot parse grid '" + text + "'");
  }
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

const char* event_name(tf_event_kind kind) {
  switch (kind) {
    case TF_EVENT_COMPLETED: return "completed";
    case TF_EVENT_CONVERGED: return "converged";
    case TF_EVENT_BLOW_UP: return "blow_up";
    case TF_EVENT_DOMAIN_EXIT: return "domain_exit";
  }
  return "?";
}

void write_event_comment(std::ostream& os, const tf_event& ev) {
  os << "# event: " << event_name(ev.kind);
  if (ev.kind == TF_EVENT_BLOW_UP || ev.kind == TF_EVENT_DOMAIN_EXIT)
    os << " field=" << ev.field;
  if (ev.kind == TF_EVENT_CONVERGED)
    os << " point=(" << g17(ev.point_a) << "," << g17(ev.point_c) << ")";
  os << " t=" << g17(ev.time) << "\n";
}

// Coupled kinds need phi (and tau); when absent, phi is solved from the
// functional's unit constraint and tau defaults to 1.
void complete_coupled_state(tf_flow_kind kind, tf_state& state) {
  if (kind != TF_FLOW_COUPLED_F && kind != TF_FLOW_COUPLED_W_PLUS &&
      kind != TF_FLOW_COUPLED_W_MINUS)
    return;
  if (kind != TF_FLOW_COUPLED_F && !state.has_tau) {
    state.tau = 1.0;
    state.has_tau = 1;
  }
  if (!state.has_phi) {
    tf_entropy_kind ek = kind == TF_FLOW_COUPLED_F ? TF_ENTROPY_F
                         : kind == TF_FLOW_COUPLED_W_PLUS ? TF_ENTROPY_W_PLUS
                                                          : TF_ENTROPY_W_MINUS;
    tf_state probe = state;
    probe.has_phi = 1;
    probe.phi = 0.0;
    double c0 = 0.0;
    check(tf_entropy_constraint(ek, &probe, 1.0, &c0));
    state.phi = std::log(c0); // e^{-phi} c0 = 1
    state.has_phi = 1;
  }
}

int cmd_classify(const SourceOptions& src) {
  ContactHandle contact;
  tf_state state;
  src.resolve(contact, state);

  tf_geometry geometry;
  int torsion_free = 0, unimodular = 0;
  check(tf_contact_classify(contact.ptr, &geometry, &torsion_free, &unimodular));
  static const char* names[] = {"SU(2)",  "SL~(2,R) hyperbolic",
                                "SL~(2,R) mixed", "E(2)",
                                "E(1,1)", "Heisenberg",
                                "not unimodular"};
  std::cout << "geometry: " << names[geometry] << "\n";
  std::cout << "unimodular: " << (unimodular ? "yes" : "no") << "\n";
  std::cout << "torsion-free J: " << (torsion_free ? "yes" : "no") << "\n";

  tf_fixed_points_kind fpk;
  double fa = 0.0, fc = 0.0;
  check(tf_contact_fixed_points(contact.ptr, &fpk, &fa, &fc));
  if (fpk == TF_FIXED_POINTS_NONE)
    std::cout << "fixed points: none\n";
  else if (fpk == TF_FIXED_POINTS_ALL)
    std::cout << "fixed points: all\n";
  else
    std::cout << "fixed points: (" << fa << ", " << fc << ")\n";

  tf_dynamics dyn;
  check(tf_contact_dynamics(contact.ptr, &dyn));
  static const char* dnames[] = {"attracting", "repelling", "unclassified"};
  std::cout << "dynamics: " << dnames[dyn] << "\n";

  double coeff[4];
  check(tf_contact_coefficients(contact.ptr, coeff));
  std::cout << "coefficients: c2_13=" << coeff[0] << " c2_23=" << coeff[1]
            << " c3_12=" << coeff[2] << " c3_23=" << coeff[3] << "\n";
  return 0;
}

void write_trajectory_csv(std::ostream& os, const tf_trajectory* traj) {
  os << "t,a,c,B,phi,tau,torsion_re,torsion_im,W,E_H\n";
  size_t n = tf_trajectory_size(traj);
  for (size_t i = 0; i < n; ++i) {
    tf_sample s;
    check(tf_trajectory_sample(traj, i, &s), kExitIntegrator);
    os << g17(s.t) << ',' << g17(s.state.a) << ',' << g17(s.state.c) << ','
       << g17(s.state.B) << ',';
    if (s.state.has_phi) os << g17(s.state.phi);
    os << ',';
    if (s.state.has_tau) os << g17(s.state.tau);
    os << ',' << g17(s.torsion_re) << ',' << g17(s.torsion_im) << ',' << g17(s.webster)
       << ',' << g17(s.einstein_hilbert) << "\n";
  }
  tf_event ev;
  check(tf_trajectory_event(traj, &ev), kExitIntegrator);
  write_event_comment(os, ev);
}

int cmd_simulate(const SourceOptions& src, const std::string& kind_name, double t_end,
                 double rtol, double atol, double dt, int samples,
                 const std::string& out_path) {
  ContactHandle contact;
  tf_state state;
  src.resolve(contact, state);
  tf_flow_kind kind = parse_kind(kind_name);
  complete_coupled_state(kind, state);

  tf_integrate_opts opts;
  tf_integrate_opts_default(&opts);
  if (rtol > 0) opts.rtol = rtol;
  if (atol > 0) opts.atol = atol;
  if (dt > 0) opts.dt = dt;
  if (samples > 0) opts.samples = samples;

  tf_trajectory* traj = nullptr;
  tf_status status = tf_integrate(contact.ptr, kind, &state, t_end, &opts, &traj);
  if (status == TF_ERR_INTERNAL) {
    std::cerr << "error: " << tf_last_error() << "\n";
    return kExitIntegrator;
  }
  check(status);
  Output out(out_path);
  write_trajectory_csv(out.stream(), traj);
  tf_trajectory_free(traj);
  return 0;
}

int cmd_portrait(const SourceOptions& src, const std::string& a_range,
                 const std::string& c_range, const std::string& grid,
                 const std::string& out_path) {
  ContactHandle contact;
  tf_state state;
  src.resolve(contact, state);
  auto [a_lo, a_hi] = parse_range(a_range);
  auto [c_lo, c_hi] = parse_range(c_range);
  auto [na, nc] = parse_grid(grid);
  if (na < 1 || nc < 1) throw InputError("grid must be at least 1x1");
  if (!(c_lo > 0) || !(c_hi > 0)) throw InputError("c-range must be positive");

  std::vector<double> buffer(static_cast<size_t>(na) * nc * 4);
  check(tf_phase_field(contact.ptr, a_lo, a_hi, c_lo, c_hi, na, nc, buffer.data()));
  Output out(out_path);
  out.stream() << "a,c,adot,cdot\n";
  for (size_t i = 0; i < buffer.size(); i += 4)
    out.stream() << g17(buffer[i]) << ',' << g17(buffer[i + 1]) << ','
                 << g17(buffer[i + 2]) << ',' << g17(buffer[i + 3]) << "\n";
  return 0;
}

int cmd_entropy(const SourceOptions& src, const std::string& kind_name, double t_end,
                double vol0, int samples, const std::string& out_path) {
  ContactHandle contact;
  tf_state state;
  src.resolve(contact, state);
  tf_flow_kind kind = parse_kind(kind_name);
  if (kind == TF_FLOW_UNNORMALIZED || kind == TF_FLOW_NORMALIZED)
    throw InputError("entropy reports require a coupled kind: f, wplus or wminus");
  if (kind != TF_FLOW_COUPLED_F && !state.has_tau) {
    state.tau = 1.0;
    state.has_tau = 1;
  }

  tf_entropy_report* rep = nullptr;
  tf_status status =
      tf_entropy_run(contact.ptr, kind, &state, t_end, vol0, samples, &rep);
  if (status == TF_ERR_INTERNAL) {
    std::cerr << "error: " << tf_last_error() << "\n";
    return kExitIntegrator;
  }
  check(status);

  Output out(out_path);
  out.stream() << "t,value,derivative,rhs_unweighted,rhs_weighted,constraint\n";
  size_t n = tf_entropy_report_size(rep);
  for (size_t i = 0; i < n; ++i) {
    tf_entropy_sample s;
    check(tf_entropy_report_sample(rep, i, &s), kExitIntegrator);
    out.stream() << g17(s.t) << ',' << g17(s.value) << ',' << g17(s.derivative) << ','
                 << g17(s.rhs_unweighted) << ',' << g17(s.rhs_weighted) << ','
                 << g17(s.constraint) << "\n";
  }

  double max_violation = 0.0, drift = 0.0;
  tf_weighting matched;
  tf_event terminal;
  check(tf_entropy_report_summary(rep, &max_violation, &drift, &matched, &terminal),
        kExitIntegrator);
  static const char* wnames[] = {"unweighted", "weighted", "neither"};
  std::cout << "functional: " << kind_name << "\n";
  std::cout << "monotone: " << (max_violation <= 1e-8 ? "yes" : "no")
            << ", max_violation = " << max_violation << "\n";
  std::cout << "constraint drift: " << drift << "\n";
  std::cout << "matched weighting: " << wnames[matched] << "\n";
  std::cout << "event: " << event_name(terminal.kind);
  if (terminal.kind == TF_EVENT_BLOW_UP || terminal.kind == TF_EVENT_DOMAIN_EXIT)
    std::cout << " field=" << terminal.field;
  std::cout << " t=" << terminal.time << "\n";
  tf_entropy_report_free(rep);
  return 0;
}

struct VerifyState {
  int failures = 0;
  std::vector<std::string> failed_suites;
};

int cmd_verify(uint64_t seed, int cases, bool inject_fault) {
  VerifyState vs;
  auto cb = [](const char* suite, int pass, const char* detail, void* user) {
    auto* state = static_cast<VerifyState*>(user);
    std::cout << (pass ? "PASS" : "FAIL") << "  " << suite << ": " << detail << "\n";
    if (!pass) state->failed_suites.push_back(suite);
  };
  int failures = 0;
  check(tf_verify_run(seed, cases, inject_fault ? 1 : 0, cb, &vs, &failures),
        kExitIntegrator);
  if (failures == 0) {
    std::cout << "all suites pass\n";
    return 0;
  }
  // Serialize the failing configuration for replay.
  json replay;
  replay["seed"] = seed;
  replay["cases"] = cases;
  replay["failed_suites"] = vs.failed_suites;
  std::ofstream rf("verify_failure.json");
  rf << replay.dump(2) << "\n";
  std::cerr << failures << " suite(s) failed; replay configuration written to "
            << "verify_failure.json\n";
  return kExitVerify;
}

int cmd_presets() {
  std::cout << "pdq(K)           c2_13=-K c3_12=1        initial (a,c,B)=(0,1,1)\n";
  std::cout << "prequant(K!=0)   c2_13=-K c3_12=1/K      initial (a,c,B)=(0,1,1)\n";
  std::cout << "heisenberg       all free coefficients 0 initial (a,c,B)=(0,1,1)\n";
  std::cout << "rossi(t in [0,1)) su2 constants          initial (a,c,B)=(0,(1-t)/(1+t),1/2)\n";
  std::cout << "su2              c2_13=-1 c3_12=1        initial (a,c,B)=(0,1,1)\n";
  std::cout << "sl2_hyperbolic   c2_13=1  c3_12=-1       initial (a,c,B)=(0,1,1)\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudohermitian invariants and torsion flows on homogeneous "
               "contact 3-manifolds"};
  app.require_subcommand(1);

  SourceOptions classify_src, simulate_src, portrait_src, entropy_src;

  auto* classify = app.add_subcommand("classify", "geometry, fixed points and dynamics");
  classify_src.attach(classify);

  auto* simulate = app.add_subcommand("simulate", "integrate a flow and write CSV");
  simulate_src.attach(simulate);
  std::string sim_kind = "unnormalized", sim_out;
  double sim_t_end = 1.0, sim_rtol = 0.0, sim_atol = 0.0, sim_dt = 0.0;
  int sim_samples = 0;
  simulate->add_option("--kind", sim_kind, "flow kind");
  simulate->add_option("--t-end", sim_t_end, "integration horizon");
  simulate->add_option("--rtol", sim_rtol, "relative tolerance");
  simulate->add_option("--atol", sim_atol, "absolute tolerance");
  simulate->add_option("--dt", sim_dt, "fixed RK4 step (overrides adaptive)");
  simulate->add_option("--samples", sim_samples, "output sample count");
  simulate->add_option("-o,--out", sim_out, "output CSV path (stdout if omitted)");

  auto* portrait = app.add_subcommand("portrait", "normalized-flow phase field CSV");
  portrait_src.attach(portrait);
  std::string par_a = "-2:2", par_c = "0.25:4", par_grid = "20x20", par_out;
  portrait->add_option("--a-range", par_a, "a range LO:HI");
  portrait->add_option("--c-range", par_c, "c range LO:HI (positive)");
  portrait->add_option("--grid", par_grid, "grid NxM");
  portrait->add_option("-o,--out", par_out, "output CSV path");

  auto* entropy = app.add_subcommand("entropy", "coupled-flow monotonicity report");
  entropy_src.attach(entropy);
  std::string ent_kind = "f", ent_out;
  double ent_t_end = 0.2, ent_vol0 = 1.0;
  int ent_samples = 0;
  entropy->add_option("--kind", ent_kind, "coupled kind: f, wplus, wminus");
  entropy->add_option("--t-end", ent_t_end, "integration horizon");
  entropy->add_option("--vol0", ent_vol0, "base volume at b=1");
  entropy->add_option("--samples", ent_samples, "output sample count");
  entropy->add_option("-o,--out", ent_out, "output CSV path");

  auto* verify = app.add_subcommand("verify", "run the self-verification suites");
  uint64_t ver_seed = 20260810;
  int ver_cases = 0;
  bool ver_fault = false;
  verify->add_option("--seed", ver_seed, "random seed");
  verify->add_option("--cases", ver_cases, "case count for randomized suites");
  verify->add_flag("--inject-fault", ver_fault, "testing hook: force one failure")
      ->group(""); // hidden
  auto* presets = app.add_subcommand("presets", "list the named presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cmd_classify(classify_src);
    if (simulate->parsed())
      return cmd_simulate(simulate_src, sim_kind, sim_t_end, sim_rtol, sim_atol, sim_dt,
                          sim_samples, sim_out);
    if (portrait->parsed())
      return cmd_portrait(portrait_src, par_a, par_c, par_grid, par_out);
    if (entropy->parsed())
      return cmd_entropy(entropy_src, ent_kind, ent_t_end, ent_vol0, ent_samples, ent_out);
    if (verify->parsed()) return cmd_verify(ver_seed, ver_cases, ver_fault);
    if (presets->parsed()) return cmd_presets();
  } catch (const InputError& e) {
    die_input(e.what());
  }
  return 0;
}
