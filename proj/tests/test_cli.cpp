#include <doctest.h>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ncd/cli.hpp"
#include "ncd/common.hpp"
#include "ncd/io.hpp"
#include "ncd/serialize.hpp"
#include "ncd/som.hpp"
#include "ncd/svg.hpp"

using namespace ncd;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "ncd_cli_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = temp_path(name);
    write_text_file(path, content);
    return path;
}

std::string cluster_csv() {
    return write_temp("clusters.csv",
                      "0.0,0.1\n0.1,0.0\n0.2,0.1\n10.0,10.1\n10.1,10.0\n10.2,10.1\n");
}

int run(std::vector<std::string> args) {
    std::vector<const char*> argv{"ncd"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("config resolution fills defaults and lets overrides win") {
    const std::string data = cluster_csv();
    const std::string cfg = write_temp("som.cfg", "# comment\nrows = 3\nsweeps=10\n");
    const RunConfig config =
        parse_config("som-train", cfg, {"rows=5", "data=" + data});
    CHECK(config.command == "som-train");
    CHECK(config.at("rows") == "5");       // override beats the file
    CHECK(config.at("sweeps") == "10");    // file beats the default
    CHECK(config.at("cols") == "4");       // untouched default
    CHECK(config.at("lattice") == "grid");
    CHECK(config.real("radius0") == 3.0);
    CHECK(config.count("seed") == 42);
    CHECK_THROWS_WITH_AS(config.at("order"),
                         "command som-train does not declare config key 'order'", InvalidInput);
}

TEST_CASE("config validation names the offending key and value") {
    const std::string data = cluster_csv();
    CHECK_THROWS_WITH_AS(parse_config("som-train", "", {"data=" + data, "radiuss=2"}),
                         "unknown config key 'radiuss' for command som-train", InvalidInput);
    CHECK_THROWS_WITH_AS(parse_config("som-train", "", {"data=" + data, "radius0=abc"}),
                         "config key 'radius0' expects a real number, got 'abc'", InvalidInput);
    CHECK_THROWS_WITH_AS(parse_config("som-train", "", {"data=" + data, "sweeps=-2"}),
                         "config key 'sweeps' expects a nonnegative integer, got '-2'",
                         InvalidInput);
    CHECK_THROWS_WITH_AS(parse_config("som-train", "", {"data=" + data, "lattice=hex"}),
                         "config key 'lattice' expects one of {grid, string}, got 'hex'",
                         InvalidInput);
    CHECK_THROWS_WITH_AS(parse_config("som-train", "", {}),
                         "missing required config key 'data' for command som-train", InvalidInput);

    const std::string missing = temp_path("missing_data.csv");
    fs::remove(missing);
    CHECK_THROWS_WITH_AS(
        parse_config("som-train", "", {"data=" + missing}),
        ("config key 'data' references a missing file: " + missing).c_str(), InvalidInput);

    CHECK_THROWS_AS(parse_config("not-a-command", "", {}), InvalidInput);
    CHECK_THROWS_AS(parse_config("som-train", "", {"data" + data}), InvalidInput); // no '='
}

TEST_CASE("config files reject malformed lines with their location") {
    const std::string bad = write_temp("bad.cfg", "rows = 3\nno equals sign\n");
    CHECK_THROWS_WITH_AS(parse_config("som-train", bad, {}),
                         (bad + ":2: expected 'key = value', got 'no equals sign'").c_str(),
                         InvalidInput);

    const std::string empty_key = write_temp("empty_key.cfg", "=3\n");
    CHECK_THROWS_WITH_AS(parse_config("som-train", empty_key, {}),
                         (empty_key + ":1: empty key").c_str(), InvalidInput);

    const std::string nowhere = temp_path("nowhere.cfg");
    fs::remove(nowhere);
    CHECK_THROWS_WITH_AS(parse_config("som-train", nowhere, {}),
                         ("cannot open config file: " + nowhere).c_str(), InvalidInput);
}

TEST_CASE("the resolved echo is sorted, complete, and reproducible") {
    const std::string data = cluster_csv();
    const RunConfig a = parse_config("som-train", "", {"data=" + data, "seed=7"});
    const RunConfig b = parse_config("som-train", "", {"seed=7", "data=" + data});
    const std::string text = a.resolved_text();
    CHECK(text == b.resolved_text());
    CHECK(text.rfind("command = som-train\n", 0) == 0);
    CHECK(text.find("seed = 7\n") != std::string::npos);
    CHECK(text.find("radius1 = 0.5\n") != std::string::npos);
    // Every declared key appears exactly once.
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == a.values.size() + 1);
}

TEST_CASE("som-train writes its artifacts and reruns byte-identically") {
    const std::string data = cluster_csv();
    const std::string out_a = temp_path("run_a");
    const std::string out_b = temp_path("run_b");
    fs::remove_all(out_a);
    fs::remove_all(out_b);

    const std::vector<std::string> overrides{"data=" + data, "lattice=string", "length=2",
                                             "sweeps=6",     "radius0=0.5",    "radius1=0.5",
                                             "seed=3"};
    auto with_out = [&](const std::string& out) {
        std::vector<std::string> o = overrides;
        o.push_back("out=" + out);
        return o;
    };
    run_command(parse_config("som-train", "", with_out(out_a)));
    run_command(parse_config("som-train", "", with_out(out_b)));

    for (const char* name : {"resolved.cfg", "map.json", "trace.csv", "map.svg"})
        CHECK(fs::exists(fs::path(out_a) / name));

    const Json map = parse_json(read_text_file((fs::path(out_a) / "map.json").string()), "map");
    CHECK(map.at("formatVersion") == kFormatVersion);
    CHECK(map.at("type") == "som-map");
    CHECK(map.at("assignments").size() == 6);
    CHECK(map.at("lattice").at("neuronCount") == 2);
    CHECK(map.at("quality").contains("quantizationError"));

    // Same seed and inputs give identical bytes; only the out path differs.
    CHECK(read_text_file((fs::path(out_a) / "map.json").string()) ==
          read_text_file((fs::path(out_b) / "map.json").string()));
    CHECK(read_text_file((fs::path(out_a) / "map.svg").string()) ==
          read_text_file((fs::path(out_b) / "map.svg").string()));
}

TEST_CASE("invalid input and numeric failures map to distinct exit codes") {
    const std::string asymmetric = write_temp("asym.csv", "0,1\n2,0\n");
    const std::string out = temp_path("err_runs");
    CHECK(run({"som-median", "matrix=" + asymmetric, "out=" + out}) == 1);

    // A symmetric matrix with a negative eigenvalue is numerically unusable
    // as a kernel: exit 2 rather than 1.
    const std::string not_psd = write_temp("not_psd.csv", "0,1\n1,0\n");
    CHECK(run({"som-kernel", "matrix=" + not_psd, "out=" + out}) == 2);

    CHECK(run({"som-train"}) == 1);               // missing required key
    CHECK(run({"definitely-not-a-command"}) == 1); // unknown subcommand
    CHECK(run({}) == 1);                           // subcommand required
    CHECK(run({"--help"}) == 0);
}

TEST_CASE("the command catalogue names every command and key") {
    const std::string help = describe_commands();
    for (const char* name : {"som-train", "som-median", "som-kernel", "som-cat", "mlp-select",
                             "hmm-sim", "hmm-fit", "forecast"})
        CHECK(help.find(name) != std::string::npos);
    CHECK(help.find("radius0") != std::string::npos);
    CHECK(help.find("default '42'") != std::string::npos);
    CHECK(help.find("required") != std::string::npos);
}

TEST_CASE("lattice renderings shade one square per neuron deterministically") {
    const MapLattice lattice = MapLattice::grid(2, 2);
    const std::vector<double> values{0.0, 1.0, 2.0, 3.0};
    const std::string svg = render_lattice_svg(lattice, values, "test");
    CHECK(svg == render_lattice_svg(lattice, values, "test"));

    std::size_t cells = 0;
    for (std::size_t pos = svg.find("<rect x="); pos != std::string::npos;
         pos = svg.find("<rect x=", pos + 1))
        ++cells;
    CHECK(cells == 4);
    CHECK(svg.find("fill=\"rgb(235,235,235)\"") != std::string::npos); // min value
    CHECK(svg.find("fill=\"rgb(40,40,40)\"") != std::string::npos);    // max value
    CHECK(svg.find("<title>neuron 3: 3</title>") != std::string::npos);

    // A flat value vector (e.g. a single neuron) shades mid-scale.
    const std::string flat = render_lattice_svg(MapLattice::string(1), {{5.0}}, "flat");
    CHECK(flat.find("fill=\"rgb(137,137,137)\"") != std::string::npos);

    CHECK_THROWS_AS(render_lattice_svg(lattice, {{1.0}}, "short"), InvalidInput);
}

TEST_CASE("u-matrix and count summaries follow their definitions") {
    const MapLattice line = MapLattice::string(3);
    const Matrix prototypes = Matrix::from_rows({{0.0}, {3.0}, {12.0}});
    const std::vector<double> u = u_matrix_values(prototypes, line);
    REQUIRE(u.size() == 3);
    CHECK(u[0] == 3.0);
    CHECK(u[1] == 6.0); // mean of |0-3| and |3-12|
    CHECK(u[2] == 9.0);
    CHECK_THROWS_AS(u_matrix_values(Matrix::from_rows({{0.0}}), line), InvalidInput);

    const std::vector<double> counts = neuron_count_values({0, 1, 1, 2}, 4);
    CHECK(counts == std::vector<double>{1.0, 2.0, 1.0, 0.0});
    CHECK_THROWS_AS(neuron_count_values({5}, 4), InvalidInput);
}
