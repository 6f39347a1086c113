// occmap: scene generation, batch replay benchmark and map export.

#include <occmap/Exporters.h>
#include <occmap/MapIO.h>
#include <occmap/RaySetFile.h>
#include <occmap/Replay.h>
#include <occmap/SceneGenerator.h>
#include <occmap/UpdateEngine.h>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace
{
using namespace occmap;

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct ExportRequest
{
  ExportFormat format;
  std::filesystem::path path;
};

/// "format:path"
ExportRequest parseExportRequest(const std::string &arg)
{
  const auto colon = arg.find(':');
  if (colon == std::string::npos || colon + 1 == arg.size())
  {
    throw ConfigError("--export expects format:path, got '" + arg + "'");
  }
  return { parseExportFormat(arg.substr(0, colon)), arg.substr(colon + 1) };
}

std::vector<ExportRequest> parseExports(const std::vector<std::string> &args)
{
  std::vector<ExportRequest> out;
  for (const std::string &a : args)
  {
    out.push_back(parseExportRequest(a));
  }
  return out;
}

struct SceneArgs
{
  std::string kind = "corridor";
  SceneSpec spec;

  void add(CLI::App &cmd)
  {
    cmd.add_option("--scene", kind, "corridor | open-field | thin-poles | mixed");
    cmd.add_option("--seed", spec.seed, "generator seed");
    cmd.add_option("--rate", spec.rate, "rays per second of sensor time");
    cmd.add_option("--duration", spec.duration, "seconds of sensor time");
    cmd.add_option("--noise", spec.noise, "range noise standard deviation (m)");
    cmd.add_option("--extent", spec.extent, "scene length along the path (m)");
  }

  SceneSpec resolve(double max_range) const
  {
    SceneSpec s = spec;
    s.kind = parseSceneKind(kind);
    s.max_range = max_range;
    if (!(s.rate > 0.0) || !(s.duration > 0.0) || !(s.extent > 0.0) || s.noise < 0.0)
    {
      throw ConfigError("scene rate, duration and extent must be positive");
    }
    return s;
  }
};

struct BenchArgs
{
  std::string input;
  std::string mode = "occupancy";
  unsigned workers = 1;
  bool reference = false;
  bool online = false;
  double speed = 1.0;
  double batch_duration = 0.1;
  std::size_t queue = 4;
  unsigned retry_limit = 20;
  MapConfig cfg;
  std::string series_csv;
  std::string summary_csv;
  std::string save;
  std::vector<std::string> exports;
};

void writeSummary(const ReplayResult &result, const std::string &path)
{
  std::cout << ReplaySummary::csvHeader() << '\n' << result.summary.csvRow() << '\n';
  if (!path.empty())
  {
    std::ofstream out(path);
    out << ReplaySummary::csvHeader() << '\n' << result.summary.csvRow() << '\n';
    if (!out)
    {
      throw IoError("cannot write " + path);
    }
  }
}

void writeSeries(const ReplayResult &result, const std::string &path)
{
  std::ofstream out(path);
  out << seriesCsvHeader() << '\n';
  for (const ReplaySample &s : result.series)
  {
    out << seriesCsvRow(s) << '\n';
  }
  if (!out)
  {
    throw IoError("cannot write " + path);
  }
}

int runBench(const BenchArgs &args, const SceneArgs &scene)
{
  args.cfg.validate();
  ReplayOptions opts;
  opts.mode = parseMode(args.mode);
  opts.online = args.online;
  opts.speed = args.speed;
  opts.batch_duration = args.batch_duration;
  opts.queue_capacity = args.queue;
  opts.executor.worker_count = args.workers;
  opts.executor.cas_retry_limit = args.retry_limit;
  if (args.reference)
  {
    if (args.workers != 1)
    {
      throw ConfigError("--reference runs with one worker");
    }
    opts.executor.kind = ExecutorKind::kSequential;
  }
  if (args.workers < 1)
  {
    throw ConfigError("--workers must be >= 1");
  }
  const auto exports = parseExports(args.exports);

  const std::vector<RaySample> rays =
    args.input.empty() ? generateScene(scene.resolve(args.cfg.max_ray_range)) : readRaySet(args.input);

  LayerSet layers = defaultLayers(opts.mode);
  for (const ExportRequest &e : exports)
  {
    if (!layers.containsAll(exportLayers(e.format)))
    {
      throw ConfigError("mode " + args.mode + " does not produce the layers " +
                        std::string(exportFormatName(e.format)) + " needs");
    }
  }
  OccupancyMap map(args.cfg, layers);
  const ReplayResult result = replay(map, rays, opts);
  writeSummary(result, args.summary_csv);
  if (!args.series_csv.empty())
  {
    writeSeries(result, args.series_csv);
  }
  for (const ExportRequest &e : exports)
  {
    exportMap(map, e.format, e.path);
  }
  if (!args.save.empty())
  {
    saveMap(map, std::filesystem::path(args.save));
  }
  return 0;
}

void addMapOptions(CLI::App &cmd, MapConfig &cfg)
{
  cmd.add_option("--voxel-size", cfg.voxel_size, "voxel edge length (m)");
  cmd.add_option("--max-range", cfg.max_ray_range, "ray clipping range (m)");
  cmd.add_option("--segment-length", cfg.segment_length, "maximum ray segment length (m)");
}
}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{ "Parallel occupancy voxel mapping" };
  app.require_subcommand(1);

  SceneArgs gen_scene;
  std::string gen_out;
  double gen_max_range = 20.0;
  CLI::App *generate = app.add_subcommand("generate", "write a synthetic ray set");
  gen_scene.add(*generate);
  generate->add_option("--max-range", gen_max_range, "sensor range; rays without a return end here (m)");
  generate->add_option("--out", gen_out, "output ray set (.ohmb)")->required();

  BenchArgs bench_args;
  SceneArgs bench_scene;
  CLI::App *bench = app.add_subcommand("bench", "integrate a ray set and report throughput");
  bench->add_option("input", bench_args.input, "ray set file; omit to generate a scene in memory");
  bench_scene.add(*bench);
  addMapOptions(*bench, bench_args.cfg);
  bench->add_option("--mode", bench_args.mode, "occupancy | ndt-om | ndt-tm | decay | tsdf");
  bench->add_option("--workers", bench_args.workers, "worker threads");
  bench->add_flag("--reference", bench_args.reference, "use the sequential reference executor");
  bench->add_option("--retry-limit", bench_args.retry_limit, "CAS attempts before the serialised fallback");
  bench->add_flag("--online", bench_args.online, "replay at the recorded rate, dropping batches when behind");
  bench->add_option("--speed", bench_args.speed, "online playback speed multiplier");
  bench->add_option("--batch-duration", bench_args.batch_duration, "seconds of sensor time per batch");
  bench->add_option("--queue", bench_args.queue, "online hand-off queue capacity (batches)");
  bench->add_option("--series", bench_args.series_csv, "per-second throughput CSV");
  bench->add_option("--summary", bench_args.summary_csv, "summary CSV (also printed to stdout)");
  bench->add_option("--save", bench_args.save, "save the resulting map");
  bench->add_option("--export", bench_args.exports, "format:path, repeatable");

  std::string export_map;
  std::vector<std::string> export_requests;
  CLI::App *exporter = app.add_subcommand("export", "export a saved map");
  exporter->add_option("map", export_map, "map file")->required();
  exporter->add_option("--export", export_requests, "format:path, repeatable")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try
  {
    if (*generate)
    {
      writeRaySet(std::filesystem::path(gen_out), generateScene(gen_scene.resolve(gen_max_range)));
      return 0;
    }
    if (*bench)
    {
      return runBench(bench_args, bench_scene);
    }
    const auto exports = parseExports(export_requests);
    OccupancyMap map = loadMap(std::filesystem::path(export_map));
    for (const ExportRequest &e : exports)
    {
      exportMap(map, e.format, e.path);
    }
    return 0;
  }
  catch (const ConfigError &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (const IoError &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
