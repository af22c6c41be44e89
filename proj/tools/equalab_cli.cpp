// Monte Carlo BER sweep driver.
//
//   equalab --snr-db 0:20:2 --detector amldfbe,mlse --lf 5,10 --out ber.csv

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "equalab/harness.hpp"

using namespace equalab;

int main(int argc, char** argv) {
  CLI::App app{"Block decision-feedback equalizer BER sweeps"};
  app.set_config("--config", "", "Key-value file with any of the long options below");

  std::string snr_text = "0:20:2";
  std::string detector_text = "amldfbe";
  std::string lf_text = "10";
  std::size_t N = 128, L = 5;
  int M = 2;
  std::optional<double> fdts;
  std::optional<double> speed_kmh;
  double fc_ghz = 2.0;
  double ts = 128.0 / kSpeedOfLight;
  int oscillators = 16;
  std::string channel_est = "perfect";
  std::uint64_t trials = 1'000'000, min_errors = 200, seed = 1;
  std::size_t batch = 32, realizations = 200, lead = 0;
  bool genie = false, analytic = false, bound = false, emit_ops = false, no_timing = false;
  std::string score = "all";
  int threads = 0;
  std::string out_path;

  app.add_option("--snr-db", snr_text, "SNR points in dB: a:b:step or a,b,c")->capture_default_str();
  app.add_option("--detector", detector_text,
                 "id[:lf[:lb]],...  ids: amldfbe amldfbe-nomf mlse lmmse mmse-dfe exhaustive")
      ->capture_default_str();
  app.add_option("--lf", lf_text, "Forward lengths crossed with ids that have none pinned")
      ->capture_default_str();
  app.add_option("--n", N, "Frame length")->capture_default_str();
  app.add_option("--l", L, "Channel taps")->capture_default_str();
  app.add_option("--mod", M, "PSK order")->capture_default_str();
  auto* fd_opt = app.add_option("--fdts", fdts, "Normalized Doppler f_d T_s");
  auto* v_opt = app.add_option("--speed-kmh", speed_kmh, "Mobile speed in km/h");
  v_opt->excludes(fd_opt);
  app.add_option("--fc-ghz", fc_ghz, "Carrier frequency in GHz")->capture_default_str();
  app.add_option("--ts", ts, "Symbol period in seconds")->capture_default_str();
  app.add_option("--oscillators", oscillators, "Sinusoids per tap")->capture_default_str();
  app.add_option("--channel-est", channel_est, "perfect or ls")
      ->check(CLI::IsMember({"perfect", "ls"}))
      ->capture_default_str();
  app.add_option("--trials", trials, "Frame cap per point")->capture_default_str();
  app.add_option("--min-errors", min_errors, "Stop a point after this many bit errors")
      ->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--batch", batch, "Frames per reduction batch")->capture_default_str();
  app.add_flag("--genie", genie, "Feed back the transmitted symbols");
  app.add_option("--score", score, "all or averaged (leading N-Lf+2 symbols)")
      ->check(CLI::IsMember({"all", "averaged"}))
      ->capture_default_str();
  app.add_option("--mmse-lead", lead, "Decision delay of the MMSE baselines")->capture_default_str();
  app.add_flag("--analytic", analytic, "Append the analytic BER curve");
  app.add_option("--realizations", realizations, "Channels in the analytic average")
      ->capture_default_str();
  app.add_flag("--bound", bound, "Append the diversity bound");
  app.add_flag("--ops", emit_ops, "Write measured op counts to <out>.ops.csv");
  app.add_flag("--no-timing", no_timing, "Write wall_seconds as 0");
  app.add_option("--threads", threads, "Workers (0: all; capped by EQUALAB_THREADS)")
      ->capture_default_str();
  app.add_option("--out", out_path, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  SweepConfig cfg;
  try {
    cfg.snr_db = parse_snr_list(snr_text);
    cfg.detectors = parse_detector_list(detector_text, parse_size_list(lf_text));
    for (DetectorSpec& d : cfg.detectors) d.lead = lead;
    cfg.N = N;
    cfg.L = L;
    cfg.M = M;
    if (speed_kmh)
      cfg.fading = FadingParams::from_motion(*speed_kmh, fc_ghz * 1e9, ts, oscillators);
    else
      cfg.fading = FadingParams::from_doppler(fdts.value_or(1e-4), oscillators);
    cfg.channel_est = channel_est == "ls" ? ChannelEstimation::Ls : ChannelEstimation::Perfect;
    cfg.trials_max = trials;
    cfg.min_bit_errors = min_errors;
    cfg.master_seed = seed;
    cfg.batch_frames = batch;
    cfg.genie_feedback = genie;
    cfg.score = score == "averaged" ? ScoreRange::Averaged : ScoreRange::All;
    cfg.timing = !no_timing;
    cfg.analytic_realizations = realizations;
    cfg.threads = threads;
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (cfg.min_bit_errors < 100)
    std::cerr << "warning: min-errors below 100 gives noisy BER estimates\n";

  std::vector<BerRecord> records;
  try {
    records = run_sweep(cfg);
    if (analytic) {
      auto a = analytic_curve(cfg);
      records.insert(records.end(), a.begin(), a.end());
    }
    if (bound) {
      auto b = bound_curve(cfg);
      records.insert(records.end(), b.begin(), b.end());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (out_path.empty()) {
    write_csv(std::cout, records);
    if (emit_ops) write_ops_csv(std::cerr, records, cfg);
    return 0;
  }
  std::ofstream os(out_path);
  if (!os) {
    std::cerr << "error: cannot open " << out_path << '\n';
    return 1;
  }
  write_csv(os, records);
  if (emit_ops) {
    std::string ops_path = out_path;
    if (ops_path.size() > 4 && ops_path.compare(ops_path.size() - 4, 4, ".csv") == 0)
      ops_path.resize(ops_path.size() - 4);
    std::ofstream ops(ops_path + ".ops.csv");
    write_ops_csv(ops, records, cfg);
  }
  return os ? 0 : 1;
}
