#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "memsim/error.hpp"

namespace memsim::cli {

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

std::string frame_stem(std::int64_t frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(frame_id));
  return buf;
}

std::pair<int, int> parse_resolution(const std::string& s) {
  const auto x = s.find_first_of("xX");
  try {
    if (x != std::string::npos) {
      std::size_t used_w = 0, used_h = 0;
      const int w = std::stoi(s.substr(0, x), &used_w);
      const int h = std::stoi(s.substr(x + 1), &used_h);
      if (used_w == x && used_h == s.size() - x - 1 && w > 0 && h > 0) return {w, h};
    }
  } catch (const std::exception&) {
  }
  throw UsageError("resolution must look like 1024x768, got '" + s + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MEMS-LiDAR scene simulation and person-detection dataset tools", "memsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "memsim 0.1.0");

  const std::map<std::string, Action> actions{
      {"simulate", register_simulate(app)}, {"render-depth", register_render_depth(app)},
      {"ingest", register_ingest(app)},     {"normalize", register_normalize(app)},
      {"mix", register_mix(app)},           {"split", register_split(app)},
      {"augment", register_augment(app)},   {"stats", register_stats(app)},
      {"evaluate", register_evaluate(app)},
  };

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) err << "run 'memsim " << app.get_subcommands().front()->get_name()
                                              << " --help' for usage\n";
    return kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  Streams io{out, err};
  try {
    return actions.at(sub->get_name())(io);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace memsim::cli
