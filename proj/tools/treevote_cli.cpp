#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "treevote/treevote.h"

int main(int argc, char** argv) {
  CLI::App app{"Decision-tree committees for worker performance data"};
  app.set_version_flag("--version", std::string("treevote ") + tv_version());
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  const char* names[][2] = {
      {"gen", "Generate synthetic worker data"},
      {"select", "Chi-square feature screening"},
      {"train", "Train the configured models and the committee"},
      {"evaluate", "Evaluate saved models"},
      {"pipeline", "Run everything end to end"},
      {"render", "Render a ROC or gain curve as SVG"},
  };
  for (const auto& n : names) {
    auto* sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("--seed", seed, "Seed (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  auto* sub = app.get_subcommands().front();
  const bool has_out = sub->count("--out") > 0;
  const bool has_seed = sub->count("--seed") > 0;

  char* console = nullptr;
  const tv_status status =
      tv_run_command(sub->get_name().c_str(), config.c_str(), has_out ? out_dir.c_str() : nullptr,
                     has_seed ? &seed : nullptr, &console);
  if (status != TV_OK) {
    std::fprintf(stderr, "error: %s\n", tv_last_error());
    // only 1-4 are meaningful exit codes
    return status <= TV_ERR_OUTPUT ? static_cast<int>(status) : 1;
  }
  std::fputs(console, stdout);
  tv_string_free(console);
  return 0;
}
