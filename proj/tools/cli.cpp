#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "surfup/error.hpp"
#include "surfup/io.hpp"
#include "surfup/metrics.hpp"
#include "surfup/parallel.hpp"
#include "surfup/shapes.hpp"
#include "surfup/upsampler.hpp"

namespace surfup::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// CLI11 wants argc/argv with a program name in front.
void parse(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<std::string> full{app.get_name()};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : full)
    argv.push_back(a.c_str());
  app.parse(static_cast<int>(argv.size()), argv.data());
}

// Maps library and flag errors onto the documented exit codes.
int guarded(const std::function<int()>& body, CLI::App& app, std::ostream& out, std::ostream& err) {
  try {
    return body();
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const InvalidConfig& e) {
    err << "error: invalid configuration: " << e.what() << "\n";
    return config_error;
  } catch (const KTooLarge& e) {
    err << "error: invalid configuration: " << e.what() << "\n";
    return config_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  }
}

std::string join(const std::vector<int>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

json config_json(const UpsampleConfig& cfg) {
  return json{{"ratios", cfg.ratios},
              {"k", cfg.k},
              {"pattern", to_string(cfg.offset_pattern)},
              {"offset_radius", cfg.offset_radius},
              {"noise_level", cfg.noise_level},
              {"rng_seed", cfg.rng_seed},
              {"lambda", cfg.lambda},
              {"pin_origin", cfg.pin_origin},
              {"ridge", cfg.fit.ridge},
              {"higher_order_damping", cfg.fit.higher_order_damping},
              {"refinement_sweeps", cfg.fit.refinement_sweeps}};
}

struct TimedRun {
  UpsampleResult result;
  std::vector<double> stage_seconds;
};

// Same steps as upsample_detailed(), with per-stage wall time.
TimedRun timed_upsample(const PointCloud& input, const UpsampleConfig& cfg) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  PointCloud current = add_noise(input, cfg.noise_level, cfg.rng_seed);
  if (current.size() < cfg.k)
    throw KTooLarge("input has " + std::to_string(current.size()) + " points, fewer than k=" +
                    std::to_string(cfg.k));
  TimedRun run{{current, {}}, {}};
  for (int r : cfg.ratios) {
    const auto t0 = clock::now();
    StageOutput s = upsample_stage(current, r, cfg);
    run.stage_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    current = s.cloud;
    run.result.stages.push_back(std::move(s));
  }
  run.result.cloud = std::move(current);
  return run;
}

json manifest_json(const UpsampleConfig& cfg, const std::string& input, const std::string& output,
                   std::size_t input_points, const TimedRun& run, bool timing) {
  json stages = json::array();
  for (std::size_t i = 0; i < run.result.stages.size(); ++i) {
    const StageOutput& s = run.result.stages[i];
    json st{{"ratio", cfg.ratios[i]},
            {"points_out", s.cloud.size()},
            {"mean_displacement_loss", s.mean_displacement_loss},
            {"mean_rms_residual", s.mean_rms_residual},
            {"degenerate_parents", s.degenerate_parents}};
    if (timing)
      st["wall_time_s"] = run.stage_seconds[i];
    stages.push_back(std::move(st));
  }
  return json{{"tool", "surfup"},
              {"version", kVersion},
              {"command", "upsample"},
              {"input", input},
              {"output", output},
              {"input_points", input_points},
              {"output_points", run.result.cloud.size()},
              {"config", config_json(cfg)},
              {"stages", std::move(stages)}};
}

void add_upsample_options(CLI::App& app, UpsampleConfig& cfg, std::string& pattern) {
  app.add_option("--k", cfg.k, "neighbors per patch")->capture_default_str();
  app.add_option("--pattern", pattern, "child offset pattern: ring or halton")
      ->capture_default_str();
  app.add_option("--offset-radius", cfg.offset_radius, "offset disk radius, fraction of scale")
      ->capture_default_str();
  app.add_option("--seed", cfg.rng_seed, "seed for noise and Halton streams")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "displacement loss weight")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (output does not depend on it)")
      ->capture_default_str();
}

} // namespace

int cmd_upsample(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Upsample a point cloud on fitted bicubic patches", "upsample");
  UpsampleConfig cfg;
  std::string input, output, manifest, pattern = "ring", format;
  bool timing = false, no_pin = false;
  app.add_option("--input", input, "input cloud (.xyz or .ply)")->required();
  app.add_option("--output", output, "output cloud (.ply writes binary PLY, else XYZ)")->required();
  app.add_option("--ratios", cfg.ratios, "per-stage upscale ratios")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--noise", cfg.noise_level, "Gaussian noise sigma, fraction of bbox diagonal")
      ->capture_default_str();
  app.add_option("--manifest", manifest, "write a JSON run manifest");
  app.add_option("--format", format, "xyz, ply_ascii or ply_binary_le (default from extension)");
  app.add_flag("--timing", timing, "record per-stage wall time in the manifest");
  app.add_flag("--no-pin-origin", no_pin, "keep the fitted constant term");
  add_upsample_options(app, cfg, pattern);

  return guarded(
      [&] {
        parse(app, args);
        cfg.offset_pattern = parse_offset_pattern(pattern);
        cfg.pin_origin = !no_pin;
        cfg.validate();
        const io::CloudFormat fmt =
            format.empty() ? io::format_for_path(output) : io::parse_cloud_format(format);
        const PointCloud cloud = io::read_cloud(input);
        const TimedRun run = timed_upsample(cloud, cfg);
        io::write_cloud(run.result.cloud, output, fmt);
        if (!manifest.empty())
          io::write_file(manifest,
                         manifest_json(cfg, input, output, cloud.size(), run, timing).dump(2) + "\n");
        out << "upsampled " << cloud.size() << " -> " << run.result.cloud.size() << " points\n";
        return int{ok};
      },
      app, out, err);
}

int cmd_eval(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Compare a predicted cloud with ground truth", "eval");
  std::string pred_path, gt_path, mesh_path, report;
  EvalOptions opts;
  bool no_emd = false;
  app.add_option("--pred", pred_path, "predicted cloud")->required();
  app.add_option("--gt", gt_path, "ground-truth cloud")->required();
  app.add_option("--mesh", mesh_path, "ground-truth mesh (OFF or PLY) for P2F");
  app.add_option("--uniformity-radii", opts.uniformity_radii, "disk-area fractions")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--uniformity-seeds", opts.uniformity_seeds, "seed count (0 = automatic)");
  app.add_option("--report", report, "write the JSON report here and text to <report>.txt");
  app.add_option("--threads", opts.threads, "worker threads")->capture_default_str();
  app.add_flag("--no-emd", no_emd, "skip EMD");

  return guarded(
      [&] {
        parse(app, args);
        for (double r : opts.uniformity_radii)
          if (!(r > 0.0 && r <= 1.0))
            throw InvalidConfig("uniformity radii must lie in (0, 1]");
        opts.compute_emd = !no_emd;
        const PointCloud pred = io::read_cloud(pred_path);
        const PointCloud gt = io::read_cloud(gt_path);
        std::optional<io::MeshLoad> mesh;
        if (!mesh_path.empty()) {
          mesh = io::read_mesh(mesh_path);
          if (mesh->dropped_faces)
            err << "warning: dropped " << mesh->dropped_faces << " zero-area faces\n";
        }
        const MetricsReport r = evaluate(pred, gt, mesh ? &mesh->mesh : nullptr, opts);
        std::string text = to_text(r);
        if (opts.compute_emd && pred.size() != gt.size()) {
          const std::string note = "# emd skipped: size mismatch (" + std::to_string(pred.size()) +
                                   " vs " + std::to_string(gt.size()) + ")\n";
          text += note;
          err << note.substr(2);
        }
        out << text;
        if (!report.empty()) {
          io::write_file(report, to_json(r));
          io::write_file(report + ".txt", text);
        }
        return int{ok};
      },
      app, out, err);
}

int cmd_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Upsample and score analytic surfaces over a noise sweep", "bench");
  std::vector<std::string> shape_names;
  for (shapes::Shape s : shapes::all_shapes())
    shape_names.push_back(shapes::to_string(s));
  std::size_t n = 512;
  std::vector<double> noise{0.0, 0.005, 0.01, 0.015};
  std::vector<double> radii = kTableRadii;
  std::string out_dir, pattern = "ring";
  bool no_emd = false;
  UpsampleConfig cfg;
  app.add_option("--shapes", shape_names, "plane, sphere, cylinder, saddle, torus")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--n", n, "input points per shape")->capture_default_str();
  app.add_option("--ratio", cfg.ratios, "per-stage upscale ratios")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--noise", noise, "noise levels, fraction of bbox diagonal")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--uniformity-radii", radii, "disk-area fractions")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_flag("--no-emd", no_emd, "skip EMD");
  add_upsample_options(app, cfg, pattern);

  return guarded(
      [&] {
        parse(app, args);
        cfg.offset_pattern = parse_offset_pattern(pattern);
        cfg.validate();
        std::vector<shapes::Shape> shape_list;
        for (const std::string& s : shape_names)
          shape_list.push_back(shapes::parse_shape(s));
        for (double lv : noise)
          if (!(lv >= 0.0))
            throw InvalidConfig("noise levels must be >= 0");
        if (n < cfg.k)
          throw InvalidConfig("--n must be at least --k");
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec)
          throw IoError("cannot create '" + out_dir + "': " + ec.message());

        const std::size_t factor = static_cast<std::size_t>(std::accumulate(
            cfg.ratios.begin(), cfg.ratios.end(), std::size_t{1},
            [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); }));
        EvalOptions eopts;
        eopts.uniformity_radii = radii;
        eopts.compute_emd = !no_emd;
        eopts.threads = cfg.threads;

        std::ostringstream table;
        table << "shape\tn\tratio\tnoise\tcd_l2\tcd_l1\temd\tp2f_mean\tp2f_max";
        for (double r : radii)
          table << "\tuniformity_" << format_double(r);
        table << "\n";

        for (shapes::Shape shape : shape_list) {
          const std::string name = shapes::to_string(shape);
          const PointCloud input = shapes::sample(shape, n, cfg.rng_seed);
          const PointCloud gt = shapes::sample(shape, n * factor, cfg.rng_seed + 1);
          const TriangleMesh mesh = shapes::ground_truth_mesh(shape);
          io::write_cloud(input, fs::path(out_dir) / (name + "_input.xyz"), io::CloudFormat::xyz);
          io::write_cloud(gt, fs::path(out_dir) / (name + "_gt.xyz"), io::CloudFormat::xyz);
          io::write_mesh_off(mesh, fs::path(out_dir) / (name + "_gt.off"));

          for (double level : noise) {
            UpsampleConfig cell = cfg;
            cell.noise_level = level;
            const TimedRun run = timed_upsample(input, cell);
            const MetricsReport rep = evaluate(run.result.cloud, gt, &mesh, eopts);

            const std::string stem = name + "_noise" + format_double(level);
            const fs::path cloud_path = fs::path(out_dir) / (stem + ".ply");
            io::write_cloud(run.result.cloud, cloud_path, io::CloudFormat::ply_binary_le);
            io::write_file(fs::path(out_dir) / (stem + "_report.json"), to_json(rep));
            json manifest = manifest_json(cell, name + "_input.xyz", cloud_path.filename().string(),
                                          input.size(), run, false);
            manifest["combined_loss"] = combined_loss(
                rep.cd_l2, run.result.stages.back().mean_displacement_loss, cell.lambda);
            io::write_file(fs::path(out_dir) / (stem + "_manifest.json"), manifest.dump(2) + "\n");

            auto opt = [](const std::optional<double>& v) {
              return v ? format_double(*v) : std::string("nan");
            };
            table << name << '\t' << n << '\t' << join(cfg.ratios, "x") << '\t'
                  << format_double(level) << '\t' << format_double(rep.cd_l2) << '\t'
                  << format_double(rep.cd_l1) << '\t' << opt(rep.emd) << '\t'
                  << opt(rep.p2f_mean) << '\t' << opt(rep.p2f_max);
            for (double r : radii) {
              const auto it = rep.uniformity.find(r);
              table << '\t' << (it == rep.uniformity.end() ? "nan" : format_double(it->second));
            }
            table << "\n";
          }
        }
        io::write_file(fs::path(out_dir) / "summary.tsv", table.str());
        out << table.str();
        return int{ok};
      },
      app, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static const char* usage =
      "usage: surfup <command> [flags]\n"
      "commands:\n"
      "  upsample   upsample a point cloud on fitted bicubic patches\n"
      "  eval       score a predicted cloud against ground truth\n"
      "  bench      run the analytic-surface benchmark\n"
      "run 'surfup <command> --help' for flags\n";
  if (args.empty()) {
    err << usage;
    return config_error;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "upsample")
    return cmd_upsample(rest, out, err);
  if (args[0] == "eval")
    return cmd_eval(rest, out, err);
  if (args[0] == "bench")
    return cmd_bench(rest, out, err);
  if (args[0] == "--help" || args[0] == "-h") {
    out << usage;
    return ok;
  }
  if (args[0] == "--version") {
    out << "surfup " << kVersion << "\n";
    return ok;
  }
  err << "unknown command '" << args[0] << "'\n" << usage;
  return config_error;
}

} // namespace surfup::cli
