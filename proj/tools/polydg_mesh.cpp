// polydg-mesh: write a generated simplicial mesh and its agglomeration map.
//
//   polydg-mesh [-c run.cfg] [key=value ...]
//
// Uses mesh_gen, mesh_n, jitter, agglomerate, seed and output; writes
// <output>.mesh and <output>.agg.

#include <CLI11.hpp>

#include <iostream>

#include "polydg/config.hpp"
#include "polydg/meshgen.hpp"
#include "polydg/study.hpp"

using namespace polydg;

int main(int argc, char** argv) {
  CLI::App app{"Generate a simplicial mesh and an agglomeration map"};
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("overrides", overrides, "key=value overrides");
  CLI11_PARSE(app, argc, argv);
  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    validate(cfg);
    if (!cfg.mesh.empty()) throw ConfigError("polydg-mesh generates meshes; drop the mesh key");
    const PolytopicMesh mesh = build_mesh(cfg);
    write_simplicial_mesh(cfg.output + ".mesh", mesh.base);
    write_agglomeration_map(cfg.output + ".agg", mesh.agg_map);
    std::cout << mesh.base.num_simplices() << " simplices, " << mesh.num_elements() << " elements, "
              << mesh.faces.size() << " faces\n";
  } catch (const std::exception& e) {
    std::cerr << "polydg-mesh: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
