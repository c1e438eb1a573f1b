#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "ess/band_search.hpp"
#include "ess/codec.hpp"
#include "ess/errors.hpp"
#include "ess/fibersim.hpp"
#include "ess/link.hpp"
#include "ess/metrics.hpp"
#include "ess/trellis.hpp"
#include "ess/trellis_io.hpp"

namespace ess::cli {

namespace {

struct TrellisBuildOpts {
  int n = 0;
  std::string alphabet = "1,3,5,7";
  std::optional<std::int64_t> emax;
  std::optional<int> bits;
  std::string band;
  std::string out;
};

struct TuneOpts {
  int n = 108;
  std::string alphabet = "1,3,5,7";
  int bits = 162;
  double energy_db = 0.44;
  double energy_tol_db = 0.15;
  double var_db = -0.67;
  int max_extra_levels = 64;
  std::string out;
  std::string sphere_out;
};

struct FileOpts {
  std::string trellis;
  std::string in;
  std::string out;
};

struct StatsOpts {
  std::string trellis;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  bool exhaustive = false;
  std::string csv;
};

struct CompareOpts {
  std::string a;
  std::string b;
};

struct SimulateOpts {
  std::string ess_trellis;
  std::string bess_trellis;
  std::string alphabet = "1,3,5,7";
  std::vector<std::string> schemes{"ess", "bess"};
  std::string powers = "-2:1:8";
  std::vector<std::uint64_t> seeds{1};
  std::string out;
  unsigned threads = 1;
  LinkParams link;
  FiberParams fiber;
};

std::optional<BandParams> parse_band(const std::string& text) {
  if (text.empty() || text == "none") return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParameterError("--band expects h,w");
  try {
    std::size_t used_h = 0, used_w = 0;
    const std::string h_text = text.substr(0, comma);
    const std::string w_text = text.substr(comma + 1);
    BandParams band{std::stoi(h_text, &used_h), std::stoi(w_text, &used_w)};
    if (used_h != h_text.size() || used_w != w_text.size()) throw std::invalid_argument(text);
    return band;
  } catch (const std::logic_error&) {
    throw ParameterError("--band expects two integers h,w, got '" + text + "'");
  }
}

std::string band_text(const Trellis& t) {
  if (!t.band()) return "none";
  return std::to_string(t.band()->height) + "," + std::to_string(t.band()->width);
}

void print_metrics(std::ostream& os, const std::string& prefix, const ShapingMetrics& m,
                   std::span<const int> alphabet) {
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    os << prefix << "p_" << alphabet[i] << '=' << m.p_amp[i] << '\n';
  }
  os << prefix << "e2=" << m.e2 << '\n'
     << prefix << "e4=" << m.e4 << '\n'
     << prefix << "var_e=" << m.var_e << '\n'
     << prefix << "kurtosis=" << m.kurtosis << '\n';
}

void print_summary(std::ostream& os, const Trellis& t) {
  const auto& p = t.params();
  os << "N=" << p.n_amplitudes << '\n'
     << "alphabet=" << p.alphabet.to_string() << '\n'
     << "emax=" << p.e_max << '\n'
     << "band=" << band_text(t) << '\n'
     << "final_levels=" << p.final_levels() << '\n'
     << "nodes=" << t.num_nodes() << '\n'
     << "sequences=" << t.num_sequences() << '\n'
     << "k=" << max_shaping_bits(t) << '\n'
     << "rate=" << static_cast<double>(max_shaping_bits(t)) / p.n_amplitudes << '\n';
  print_metrics(os, "", exact_metrics(t), p.alphabet.values());
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::binary) {
  std::ofstream f(path, mode);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  return f;
}

int cmd_trellis_build(const TrellisBuildOpts& o, std::ostream& out, std::ostream& err) {
  const Alphabet alphabet = Alphabet::parse(o.alphabet);
  std::int64_t emax = 0;
  if (o.emax) {
    emax = *o.emax;
  } else {
    emax = min_emax_for_bits(o.n, alphabet, *o.bits);
    err << "info: selected emax=" << emax << " for k=" << *o.bits << '\n';
  }
  bool rounded = false;
  const auto params = TrellisParams::make(o.n, alphabet, emax, &rounded);
  if (rounded) {
    err << "warning: emax=" << emax << " is off the energy grid; rounded down to " << params.e_max
        << '\n';
  }
  const auto band = parse_band(o.band);
  const Trellis t = band ? build_band_trellis(params, *band) : build_full_trellis(params);
  if (o.out.empty()) {
    serialize(t, out);
    print_summary(err, t);
  } else {
    save_trellis(t, o.out);
    print_summary(out, t);
  }
  return 0;
}

int cmd_trellis_tune(const TuneOpts& o, std::ostream& out, std::ostream& err) {
  const Alphabet alphabet = Alphabet::parse(o.alphabet);
  BandSearchTarget target;
  target.k = o.bits;
  target.energy_db = o.energy_db;
  target.energy_tol_db = o.energy_tol_db;
  target.var_db = o.var_db;
  target.max_extra_levels = o.max_extra_levels;
  const auto result = search_band(o.n, alphabet, target);
  err << "info: evaluated " << result.evaluated << " (emax, w) pairs\n";
  if (!result.best) throw EmptyCodebookError("no band with lower kurtosis reaches the rate");
  const auto& best = *result.best;
  const Trellis t = build_band_trellis(best.params, best.band);
  save_trellis(t, o.out);
  if (!o.sphere_out.empty()) save_trellis(build_full_trellis(result.sphere_params), o.sphere_out);
  out << "sphere_emax=" << result.sphere_params.e_max << '\n'
      << "band_emax=" << best.params.e_max << '\n'
      << "band_h=" << best.band.height << '\n'
      << "band_w=" << best.band.width << '\n'
      << "k=" << max_shaping_bits(t) << '\n'
      << "delta_energy_db=" << best.energy_db << '\n'
      << "delta_var_db=" << best.var_db << '\n'
      << "sphere_kurtosis=" << result.sphere_metrics.kurtosis << '\n'
      << "band_kurtosis=" << best.metrics.kurtosis << '\n';
  return 0;
}

int cmd_trellis_info(const std::string& path, std::ostream& out) {
  print_summary(out, load_trellis(path));
  return 0;
}

int cmd_shape(const FileOpts& o, std::ostream& out, std::ostream& err) {
  const Trellis t = load_trellis(o.trellis);
  auto in = open_in(o.in);
  auto dst = open_out(o.out);
  const auto blocks =
      shape_stream(t, in, [&](const AmplitudeSequence& seq) { write_sequence(dst, seq); });
  if (!dst.flush()) throw Error("write failed for '" + o.out + "'");
  err << "info: shaped " << blocks << " blocks of k=" << max_shaping_bits(t) << " bits\n";
  (void)out;
  return 0;
}

int cmd_deshape(const FileOpts& o, std::ostream& err) {
  const Trellis t = load_trellis(o.trellis);
  auto in = open_in(o.in);
  std::ostringstream bytes;
  const auto blocks = deshape_stream(t, in, bytes);
  auto dst = open_out(o.out);
  dst << bytes.str();
  if (!dst.flush()) throw Error("write failed for '" + o.out + "'");
  err << "info: deshaped " << blocks << " sequences\n";
  return 0;
}

int cmd_stats(const StatsOpts& o, std::ostream& out) {
  const Trellis t = load_trellis(o.trellis);
  const auto alphabet = t.alphabet().values();
  const int k = max_shaping_bits(t);
  const auto exact = exact_metrics(t);
  const auto used = sampled_metrics(t, k, o.samples, o.seed,
                                    o.exhaustive ? SamplingMode::exhaustive : SamplingMode::random);
  out << std::setprecision(10);
  out << "k=" << k << '\n' << "sequences=" << t.num_sequences() << '\n';
  print_metrics(out, "all.", exact, alphabet);
  print_metrics(out, "used.", used.metrics, alphabet);
  out << "used.samples=" << used.num_samples << '\n'
      << "used.seed=" << used.seed << '\n'
      << "used.exhaustive=" << (used.exhaustive ? "true" : "false") << '\n'
      << "used.e2_stderr=" << used.e2_stderr << '\n'
      << "used.e4_stderr=" << used.e4_stderr << '\n';
  if (!o.csv.empty()) {
    auto csv = open_out(o.csv);
    csv << std::setprecision(12);
    csv << "row,amplitude,p_all,p_used,e2_all,e2_used,e4_all,e4_used,var_all,var_used,"
           "kurtosis_all,kurtosis_used\n";
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
      csv << "symbol," << alphabet[i] << ',' << exact.p_amp[i] << ',' << used.metrics.p_amp[i]
          << ",,,,,,,,\n";
    }
    csv << "moments,,,," << exact.e2 << ',' << used.metrics.e2 << ',' << exact.e4 << ','
        << used.metrics.e4 << ',' << exact.var_e << ',' << used.metrics.var_e << ','
        << exact.kurtosis << ',' << used.metrics.kurtosis << '\n';
  }
  return 0;
}

int cmd_compare(const CompareOpts& o, std::ostream& out) {
  const Trellis a = load_trellis(o.a);
  const Trellis b = load_trellis(o.b);
  if (a.length() != b.length() || a.alphabet() != b.alphabet()) {
    throw ParameterError("trellises differ in N or alphabet");
  }
  const auto ma = exact_metrics(a);
  const auto mb = exact_metrics(b);
  const auto alphabet = a.alphabet().values();
  out << std::setprecision(10);
  out << "a.emax=" << a.params().e_max << "\na.band=" << band_text(a)
      << "\na.k=" << max_shaping_bits(a) << '\n';
  print_metrics(out, "a.", ma, alphabet);
  out << "b.emax=" << b.params().e_max << "\nb.band=" << band_text(b)
      << "\nb.k=" << max_shaping_bits(b) << '\n';
  print_metrics(out, "b.", mb, alphabet);
  out << "delta_energy_db=" << compare_db(mb.e2, ma.e2) << '\n'
      << "delta_var_db=" << compare_db(mb.var_e, ma.var_e) << '\n'
      << "kurtosis_ratio=" << mb.kurtosis / ma.kurtosis << '\n';
  return 0;
}

std::uint64_t rail_seed(std::uint64_t seed, int rail) {
  return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(rail) + 1;
}

int cmd_simulate(const SimulateOpts& o, std::ostream& out, std::ostream& err) {
  o.link.validate();
  o.fiber.validate(true);
  const auto powers = parse_power_sweep(o.powers);
  std::optional<Trellis> ess_t, bess_t;
  for (const auto& s : o.schemes) {
    if (s == "ess") {
      if (o.ess_trellis.empty()) throw ParameterError("scheme 'ess' needs --ess-trellis");
      if (!ess_t) ess_t = load_trellis(o.ess_trellis);
    } else if (s == "bess") {
      if (o.bess_trellis.empty()) throw ParameterError("scheme 'bess' needs --bess-trellis");
      if (!bess_t) bess_t = load_trellis(o.bess_trellis);
    } else if (s != "uniform") {
      throw ParameterError("unknown scheme '" + s + "' (ess, bess, uniform)");
    }
  }
  const Alphabet uniform_alphabet = Alphabet::parse(o.alphabet);

  struct Job {
    std::string scheme;
    double power;
    std::uint64_t seed;
    double snr = 0.0;
  };
  std::vector<Job> jobs;
  for (const auto& s : o.schemes) {
    for (double p : powers) {
      for (auto seed : o.seeds) jobs.push_back({s, p, seed});
    }
  }

  const auto amplitudes = [&](const std::string& scheme, std::uint64_t seed, int rail) {
    const std::size_t n = o.link.burst_symbols;
    if (scheme == "ess") return draw_shaped_amplitudes(*ess_t, n, rail_seed(seed, rail));
    if (scheme == "bess") return draw_shaped_amplitudes(*bess_t, n, rail_seed(seed, rail));
    return draw_uniform_amplitudes(uniform_alphabet, n, rail_seed(seed, rail));
  };
  const auto run_job = [&](Job& job) {
    LinkParams link = o.link;
    link.launch_power_dbm = job.power;
    link.seed = job.seed;
    job.snr = run_link(amplitudes(job.scheme, job.seed, 0), amplitudes(job.scheme, job.seed, 1),
                       link, o.fiber)
                  .effective_snr_db;
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(jobs.size())));
  if (threads == 1) {
    for (auto& job : jobs) {
      run_job(job);
      err << "info: " << job.scheme << " " << job.power << " dBm seed " << job.seed << " -> "
          << job.snr << " dB\n";
    }
  } else {
    std::vector<std::exception_ptr> failures(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t j = w; j < jobs.size(); j += threads) run_job(jobs[j]);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  std::ostringstream rows;
  rows << std::setprecision(10);
  for (const auto& job : jobs) {
    rows << job.scheme << ',' << job.power << ',' << job.snr << ',' << job.seed << ','
         << o.link.step_km << ',' << o.link.sps << ',' << o.link.burst_symbols << '\n';
  }
  constexpr const char* kHeader = "scheme,launch_power_dbm,snr_db,seed,step_km,sps,burst_symbols\n";
  if (o.out.empty()) {
    out << kHeader << rows.str();
  } else {
    const bool fresh = !std::filesystem::exists(o.out) || std::filesystem::file_size(o.out) == 0;
    auto csv = open_out(o.out, std::ios::binary | std::ios::app);
    if (fresh) csv << kHeader;
    csv << rows.str();
    if (!csv.flush()) throw Error("write failed for '" + o.out + "'");
  }
  return 0;
}

void add_link_options(CLI::App* app, SimulateOpts& o) {
  app->add_option("--baud-gbd", o.link.baud_rate_gbd, "Symbol rate in GBd")->capture_default_str();
  app->add_option("--rolloff", o.link.rrc_rolloff, "RRC roll-off")->capture_default_str();
  app->add_option("--nf-db", o.link.edfa_nf_db, "EDFA noise figure (dB)")->capture_default_str();
  app->add_option("--sps", o.link.sps, "Samples per symbol (>= 4)")->capture_default_str();
  app->add_option("--step-km", o.link.step_km, "SSFM step (km)")->capture_default_str();
  app->add_option("--burst", o.link.burst_symbols, "Symbols per burst")->capture_default_str();
  app->add_option("--rrc-span", o.link.rrc_span_symbols, "RRC span in symbols (even)")
      ->capture_default_str();
  app->add_option("--guard", o.link.guard_symbols, "Guard ring symbols discarded before SNR")
      ->capture_default_str();
  app->add_option("--alpha-db-km", o.fiber.alpha_db_per_km, "Attenuation (dB/km)")
      ->capture_default_str();
  app->add_option("--dispersion", o.fiber.dispersion_ps_nm_km, "Dispersion (ps/nm/km)")
      ->capture_default_str();
  app->add_option("--gamma", o.fiber.gamma_per_w_km, "Nonlinear coefficient (1/W/km)")
      ->capture_default_str();
  app->add_option("--length-km", o.fiber.length_km, "Span length (km)")->capture_default_str();
  app->add_option("--wavelength-nm", o.fiber.ref_wavelength_nm, "Carrier wavelength (nm)")
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Enumerative sphere shaping (ESS) and band-trellis ESS toolkit", "ess"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with option overrides ([subcommand] sections)");
  app.footer(
      "Configuration files use key=value lines; options of a subcommand go under a\n"
      "[subcommand] section, e.g. [simulate] followed by powers=\"-2:1:8\".\n"
      "The effective configuration is echoed to stderr before each run.");

  TrellisBuildOpts build_opts;
  TuneOpts tune_opts;
  std::string info_path;
  FileOpts shape_opts, deshape_opts;
  StatsOpts stats_opts;
  CompareOpts compare_opts;
  SimulateOpts sim_opts;

  auto* trellis = app.add_subcommand("trellis", "Build, tune or inspect trellis files");
  trellis->require_subcommand(1);
  auto* build = trellis->add_subcommand("build", "Build a sphere or band trellis");
  build->add_option("--n", build_opts.n, "Sequence length N")->required()->check(CLI::PositiveNumber);
  build->add_option("--alphabet", build_opts.alphabet, "Comma-separated odd amplitudes")
      ->capture_default_str();
  auto* emax_opt = build->add_option("--emax", build_opts.emax, "Maximum sequence energy");
  auto* bits_opt =
      build->add_option("--bits", build_opts.bits, "Target k; selects the smallest E_max reaching it");
  emax_opt->excludes(bits_opt);
  build->add_option("--band", build_opts.band, "Band height and width as h,w (default: none)");
  build->add_option("--out", build_opts.out, "Trellis file (default: stdout)");

  auto* tune = trellis->add_subcommand("tune", "Search (E_max, h, w) for a band trellis at rate k/N");
  tune->add_option("--n", tune_opts.n, "Sequence length N")->capture_default_str();
  tune->add_option("--alphabet", tune_opts.alphabet, "Comma-separated odd amplitudes")
      ->capture_default_str();
  tune->add_option("--bits", tune_opts.bits, "Target k")->capture_default_str();
  tune->add_option("--energy-db", tune_opts.energy_db, "Target E[A^2] increase over the sphere")
      ->capture_default_str();
  tune->add_option("--energy-tol-db", tune_opts.energy_tol_db, "Accepted energy deviation")
      ->capture_default_str();
  tune->add_option("--var-db", tune_opts.var_db, "Target var[A^2] change over the sphere")
      ->capture_default_str();
  tune->add_option("--max-extra-levels", tune_opts.max_extra_levels,
                   "E_max grid steps explored above the sphere")
      ->capture_default_str();
  tune->add_option("--out", tune_opts.out, "Band trellis file")->required();
  tune->add_option("--sphere-out", tune_opts.sphere_out, "Also write the sphere trellis here");

  auto* info = trellis->add_subcommand("info", "Summarise a trellis file");
  info->add_option("--in", info_path, "Trellis file")->required();

  auto* shape_cmd = app.add_subcommand("shape", "Bits (raw bytes, MSB first) to amplitude lines");
  shape_cmd->add_option("--trellis", shape_opts.trellis, "Trellis file")->required();
  shape_cmd->add_option("--in", shape_opts.in, "Input bit file")->required();
  shape_cmd->add_option("--out", shape_opts.out, "Output amplitude file")->required();

  auto* deshape_cmd = app.add_subcommand("deshape", "Amplitude lines back to raw bytes");
  deshape_cmd->add_option("--trellis", deshape_opts.trellis, "Trellis file")->required();
  deshape_cmd->add_option("--in", deshape_opts.in, "Input amplitude file")->required();
  deshape_cmd->add_option("--out", deshape_opts.out, "Output bit file")->required();

  auto* stats = app.add_subcommand("stats", "Exact and used-codebook shaping statistics");
  stats->add_option("--trellis", stats_opts.trellis, "Trellis file")->required();
  stats->add_option("--samples", stats_opts.samples, "Monte Carlo samples over used indices")
      ->capture_default_str();
  stats->add_option("--seed", stats_opts.seed, "Sampling seed")->capture_default_str();
  stats->add_flag("--exhaustive", stats_opts.exhaustive, "Enumerate all 2^k used indices");
  stats->add_option("--csv", stats_opts.csv, "Also write a per-symbol CSV here");

  auto* compare = app.add_subcommand("compare", "Side-by-side metrics of two trellises");
  compare->add_option("--a", compare_opts.a, "Reference trellis (e.g. ESS)")->required();
  compare->add_option("--b", compare_opts.b, "Compared trellis (e.g. B-ESS)")->required();

  auto* simulate = app.add_subcommand("simulate", "Single-span SSFM launch-power sweep");
  simulate->add_option("--ess-trellis", sim_opts.ess_trellis, "Trellis for scheme 'ess'");
  simulate->add_option("--bess-trellis", sim_opts.bess_trellis, "Trellis for scheme 'bess'");
  simulate->add_option("--alphabet", sim_opts.alphabet, "Alphabet for scheme 'uniform'")
      ->capture_default_str();
  simulate->add_option("--schemes", sim_opts.schemes, "Comma list of ess, bess, uniform")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--powers", sim_opts.powers, "Launch powers in dBm, start:step:stop")
      ->capture_default_str();
  simulate->add_option("--seeds", sim_opts.seeds, "Comma list of seeds")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--threads", sim_opts.threads, "Worker threads over grid points")
      ->capture_default_str();
  simulate->add_option("--out", sim_opts.out, "Append CSV rows here (default: stdout)");
  add_link_options(simulate, sim_opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // Subcommand help requests surface as CallForHelp on the subcommand.
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    CLI::App* leaf = &app;
    std::string section;
    while (!leaf->get_subcommands().empty()) {
      leaf = leaf->get_subcommands().front();
      section += (section.empty() ? "" : ".") + leaf->get_name();
    }
    err << "# effective configuration\n[" << section << "]\n" << leaf->config_to_str(true, false);
    if (*trellis) {
      if (*build) {
        if (!build_opts.emax && !build_opts.bits) {
          throw ParameterError("trellis build needs --emax or --bits");
        }
        return cmd_trellis_build(build_opts, out, err);
      }
      if (*tune) return cmd_trellis_tune(tune_opts, out, err);
      return cmd_trellis_info(info_path, out);
    }
    if (*shape_cmd) return cmd_shape(shape_opts, out, err);
    if (*deshape_cmd) return cmd_deshape(deshape_opts, err);
    if (*stats) return cmd_stats(stats_opts, out);
    if (*compare) return cmd_compare(compare_opts, out);
    return cmd_simulate(sim_opts, out, err);
  } catch (const ess::Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ess::cli
