#include "hardy/error.hpp"
#include "hardy/experiment.hpp"
#include "hardy/reference.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Weighted Hardy constants by finite elements"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "JSON config")->required();
  auto* validate = app.add_subcommand("validate", "Validate an experiment config");
  validate->add_option("config", config, "JSON config")->required();
  auto* list = app.add_subcommand("list-domains", "List catalogue domains");

  double delta = 0.0;
  std::string domain_class;
  auto* ref = app.add_subcommand("reference", "Closed-form thresholds for a weight and domain class");
  ref->add_option("--delta", delta, "weight exponent")->required();
  ref->add_option("--domain-class", domain_class, "c11 | convex | convex-complement")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) return hardy::run_config(config, std::cout);
  if (*validate) return hardy::validate_config(config, std::cout);
  if (*list) {
    for (const auto& key : hardy::catalogue_keys()) {
      if (key.find("...") != std::string::npos) {
        std::cout << "wedge-complement(alpha=<radians>)  kind=wedge-complement d=2 d_H=1 class=convex-complement\n";
        continue;
      }
      const auto d = hardy::domain_from_key(key);
      std::cout << key << "  kind=" << hardy::to_string(d.kind) << " d=" << d.dim
                << " d_H=" << d.hausdorff_dim << " class=" << hardy::to_string(d.convexity);
      if (d.uniformity_note) std::cout << "  (" << *d.uniformity_note << ")";
      std::cout << '\n';
    }
    return 0;
  }
  if (*ref) {
    try {
      const auto cls = hardy::convexity_from_string(domain_class);
      const auto t = hardy::threshold_report(cls, delta);
      std::printf("delta %.17g\n", t.delta);
      std::printf("domain_class %s\n", hardy::to_string(t.domain_class).c_str());
      std::printf("self_adjoint_sufficient %s\n", t.self_adjoint_sufficient ? "true" : "false");
      std::printf("necessary_met %s\n", t.necessary_met ? "true" : "false");
      if (t.beta_star) std::printf("beta_star %.17g\n", *t.beta_star);
      else std::printf("beta_star none\n");
      std::printf("boundary_constant %.17g\n", hardy::smooth_constant(delta));
      return 0;
    } catch (const hardy::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}
