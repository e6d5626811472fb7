#include "support.hpp"

#include <ringburst/errors.hpp>
#include <ringburst/runner.hpp>
#include <ringburst/scenario.hpp>

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

using namespace ringburst;
namespace fs = std::filesystem;

namespace {

fs::path scenario(const std::string& name)
{
    return support::source_dir() / "scenarios" / (name + ".json");
}

const char* minimal = R"({
  "name": "mini",
  "ring": {
    "r0": "0.3 um",
    "d": "20 nm",
    "N": 160,
    "T": 4
  },
  "pulses": {
    "events": [ { "type": "kick", "axis": "x", "t": 0, "alpha": 0.1 } ]
  },
  "simulation": { "span": "4 tau_F" }
}
)";

std::string error_of(const std::string& text, const std::vector<Override>& ovs = {})
{
    try {
        parse_config_text(text, "inline.json", ovs);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

int exit_code(const std::string& args)
{
    const std::string cmd = std::string(RINGBURST_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("bundled first-figure scenario")
    {
        const ScenarioConfig cfg = parse_config(scenario("fig1a"));
        CHECK(cfg.ring.r0 == doctest::Approx(0.3e-6));
        CHECK(cfg.ring.d == doctest::Approx(20e-9));
        CHECK(cfg.ring.N == 160);
        CHECK(cfg.ring.T == 4.0);
        CHECK(cfg.ring.m_eff == doctest::Approx(0.067 * 9.1093837015e-31));
        CHECK(cfg.ring.kappa == 12.5);
        CHECK(cfg.ring.M_cut > 0);
        CHECK(cfg.detector.DeltaT == doctest::Approx(100e-12));
        REQUIRE(cfg.pulses.events().size() == 2);
        const auto& k0 = std::get<KickEvent>(cfg.pulses.events()[0]);
        const auto& k1 = std::get<KickEvent>(cfg.pulses.events()[1]);
        CHECK(k0.axis == Axis::x);
        CHECK(k1.axis == Axis::y);
        CHECK(k0.alpha == 0.4);
        CHECK(k0.tau_d == doctest::Approx(0.5e-12));
        CHECK(k1.t_on == doctest::Approx(0.25 * cfg.scales.tau_F));
        CHECK(cfg.band_lo == doctest::Approx(0.5 * cfg.scales.omega_F));
        CHECK(cfg.band_hi == doctest::Approx(1.5 * cfg.scales.omega_F));
        CHECK(cfg.theta == 0.0);
    }

    TEST_CASE("bundled second-figure scenario")
    {
        const ScenarioConfig cfg = parse_config(scenario("fig2"));
        CHECK(cfg.ring.r0 == doctest::Approx(1.35e-6));
        CHECK(cfg.ring.d == doctest::Approx(50e-9));
        CHECK(cfg.ring.N == 400);
        CHECK(cfg.ring.T == 4.0);
        const auto& ev = cfg.pulses.events();
        REQUIRE(ev.size() == 4);
        for (const auto& e : ev) {
            const auto& k = std::get<KickEvent>(e);
            CHECK(k.alpha == 0.2);
            CHECK(k.tau_d == doctest::Approx(3e-12));
        }
        // the chirality reverses every 0.7 ns
        CHECK(std::get<KickEvent>(ev[0]).axis == Axis::x);
        CHECK(std::get<KickEvent>(ev[2]).axis == Axis::y);
        CHECK(std::get<KickEvent>(ev[2]).t_on == doctest::Approx(0.7e-9));
        CHECK(std::get<KickEvent>(ev[3]).t_on ==
              doctest::Approx(0.7e-9 + 0.25 * cfg.scales.tau_F));
        CHECK(cfg.pulses.repeat_period() == doctest::Approx(1.4e-9));
    }

    TEST_CASE("every bundled scenario validates")
    {
        for (const auto& e : fs::directory_iterator(support::source_dir() / "scenarios")) {
            CAPTURE(e.path().string());
            CHECK_NOTHROW(parse_config(e.path()));
        }
    }

    TEST_CASE("missing radius names the field")
    {
        std::string text = minimal;
        const std::string line = "    \"r0\": \"0.3 um\",\n";
        text.replace(text.find(line), line.size(), "");
        const std::string msg = error_of(text);
        CHECK(msg.find("ring.r0") != std::string::npos);
        CHECK(msg.find("missing") != std::string::npos);
    }

    TEST_CASE("unknown keys are rejected with their line")
    {
        std::string text = minimal;
        text.replace(text.find("\"r0\""), 4, "\"r00\"");
        const std::string msg = error_of(text);
        CHECK(msg.find("ring.r00") != std::string::npos);
        CHECK(msg.find("unknown key") != std::string::npos);
        CHECK(msg.find("inline.json:4:") != std::string::npos);

        CHECK(error_of(R"({"ring": {}, "colour": 3})").find("colour") != std::string::npos);
        CHECK(!error_of("{ not json").empty());
    }

    TEST_CASE("invalid values report the field")
    {
        CHECK(error_of(minimal, {{"ring.N", "161"}}).find("ring.N") != std::string::npos);
        CHECK(error_of(minimal, {{"ring.d", "\"1 um\""}}).find("ring.d") != std::string::npos);
        CHECK(error_of(minimal, {{"ring.r0", "\"3 parsecs\""}}).find("ring.r0") != std::string::npos);
        CHECK(!error_of(minimal, {{"simulation.samples_per_tau_F", "32"}}).empty());
        CHECK(!error_of(minimal, {{"detector.theta", "4"}}).empty());
        CHECK(!error_of(minimal, {{"pulses.events.0.type", "\"laser\""}}).empty());
    }

    TEST_CASE("overrides on dotted paths")
    {
        const ScenarioConfig a = parse_config_text(minimal, "inline.json",
                                                   {{"ring.T", "10"}, {"pulses.events.0.alpha", "0.3"}});
        CHECK(a.ring.T == 10.0);
        CHECK(std::get<KickEvent>(a.pulses.events()[0]).alpha == 0.3);
        const ScenarioConfig b = parse_config_text(minimal, "inline.json", {{"ring.d", "30 nm"}});
        CHECK(b.ring.d == doctest::Approx(30e-9));

        const Override ov = parse_override("ring.T=1.5");
        CHECK(ov.first == "ring.T");
        CHECK(ov.second == "1.5");
        CHECK_THROWS_AS(parse_override("ring.T"), ConfigError);
        nlohmann::json doc = nlohmann::json::parse(minimal);
        CHECK_THROWS_AS(apply_override(doc, {"pulses.events.5.alpha", "1"}), ConfigError);
        CHECK_THROWS_AS(apply_override(doc, {"ring.N.x", "1"}), ConfigError);
    }

    TEST_CASE("quantities with units")
    {
        const double tau = 8e-12;
        const double w = 7e11;
        CHECK(parse_quantity("0.5 ps", Dimension::time) == doctest::Approx(0.5e-12));
        CHECK(parse_quantity("2 tau_F", Dimension::time, tau) == doctest::Approx(16e-12));
        CHECK(parse_quantity("0.7 ns + 0.25 tau_F", Dimension::time, tau) ==
              doctest::Approx(0.7e-9 + 2e-12));
        CHECK(parse_quantity("20 nm", Dimension::length) == doctest::Approx(20e-9));
        CHECK(parse_quantity("1.35 um", Dimension::length) == doctest::Approx(1.35e-6));
        CHECK(parse_quantity("1.5 omega_F", Dimension::angular_frequency, tau, w) ==
              doctest::Approx(1.05e12));
        CHECK(parse_quantity("30 meV", Dimension::angular_frequency) ==
              doctest::Approx(30e-3 * 1.602176634e-19 / 1.054571817e-34));
        CHECK(parse_quantity(3.5e-9, Dimension::time) == 3.5e-9);
        CHECK_THROWS_AS(parse_quantity("3 nm", Dimension::time), ConfigError);
        CHECK_THROWS_AS(parse_quantity("fast", Dimension::time), ConfigError);
        CHECK_THROWS_AS(parse_quantity(nlohmann::json::array(), Dimension::time), ConfigError);
    }

    TEST_CASE("hash and number formatting")
    {
        CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
        CHECK(format_double(0.1) == "0.10000000000000001");
        CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
        CHECK(std::string(version_string()).find("ringburst") == 0);
    }

    TEST_CASE("rates table names the dominant channel")
    {
        const auto dir = support::scratch_dir("rates");
        const ScenarioConfig cfg = parse_config(scenario("fig1a"));
        RunOptions opts;
        opts.out_dir = dir;
        const RunOutputs out = run("rates", cfg, opts);
        CHECK(out.files.size() == 3);
        const std::string table = support::read_file(dir / "fig1a.rates.csv");
        CHECK(table.rfind("quantity,value,unit\n", 0) == 0);
        for (const char* key : {"\ngamma,", "\ngamma_s,", "\ngamma_ssp_dipole,", "\ntau_F,"})
            CHECK(table.find(key) != std::string::npos);
        CHECK(table.find("dominant_channel,incoherent_phonon") != std::string::npos);
        const std::string pairs = support::read_file(dir / "fig1a.rate_tables.csv");
        CHECK(pairs.rfind("m,mp,gamma_sp,gamma_ssp,Gamma_total\n", 0) == 0);
        const auto rows = std::count(pairs.begin(), pairs.end(), '\n');
        const long dim = 2 * cfg.ring.M_cut + 1;
        CHECK(rows == dim * dim + 1);
        CHECK(fs::exists(dir / "fig1a.rates.manifest.json"));
    }

    TEST_CASE("reruns are byte-identical and the manifest reproduces the run")
    {
        const std::vector<Override> small = {{"simulation.span", "\"140 tau_F\""},
                                             {"detector.n_omega", "96"},
                                             {"detector.t_step", "\"50 ps\""}};
        const ScenarioConfig cfg = parse_config(scenario("fig1a"), small);
        const auto d1 = support::scratch_dir("det1");
        const auto d2 = support::scratch_dir("det2");
        const auto d3 = support::scratch_dir("det3");
        RunOptions o;
        o.out_dir = d1;
        run("pcirc", cfg, o);
        o.out_dir = d2;
        run("pcirc", parse_config(scenario("fig1a"), small), o);
        const std::string a = support::read_file(d1 / "fig1a.pcirc.csv");
        CHECK(!a.empty());
        CHECK(a == support::read_file(d2 / "fig1a.pcirc.csv"));
        CHECK(support::read_file(d1 / "fig1a.pcirc.manifest.json") ==
              support::read_file(d2 / "fig1a.pcirc.manifest.json"));

        const std::string manifest = support::read_file(d1 / "fig1a.pcirc.manifest.json");
        const ScenarioConfig again = parse_config_text(manifest, "manifest.json");
        CHECK(again.resolved == cfg.resolved);
        o.out_dir = d3;
        run("pcirc", again, o);
        CHECK(support::read_file(d3 / "fig1a.pcirc.csv") == a);
        const auto h1 = nlohmann::json::parse(manifest)["_manifest"]["config_hash"];
        const auto h3 = nlohmann::json::parse(support::read_file(d3 / "fig1a.pcirc.manifest.json"))["_manifest"]["config_hash"];
        CHECK(h1 == h3);
    }

    TEST_CASE("a failing run leaves no files behind")
    {
        const auto dir = support::scratch_dir("failure");
        const ScenarioConfig cfg = parse_config(scenario("fig1a"),
                                                {{"simulation.span", "\"20 tau_F\""},
                                                 {"detector.theta", "0.5"}});
        RunOptions o;
        o.out_dir = dir;
        CHECK_THROWS_AS(run("spectrogram", cfg, o), UnsupportedError);
        CHECK(fs::is_empty(dir));
        CHECK_THROWS_AS(run("plot", cfg, o), ConfigError);
        CHECK(fs::is_empty(dir));
    }

    TEST_CASE("off-normal observers still get circular traces")
    {
        const auto dir = support::scratch_dir("angular");
        const ScenarioConfig cfg = parse_config(scenario("fig1a"),
                                                {{"simulation.span", "\"140 tau_F\""},
                                                 {"detector.n_omega", "64"},
                                                 {"detector.t_step", "\"100 ps\""},
                                                 {"detector.theta", "3.141592653589793"}});
        RunOptions o;
        o.out_dir = dir;
        run("pcirc", cfg, o);
        const std::string csv = support::read_file(dir / "fig1a.pcirc.csv");
        // the antipodal observer sees the opposite helicity
        CHECK(csv.find(",-0.99") != std::string::npos);
    }

    TEST_CASE("sweep runs every point")
    {
        const auto dir = support::scratch_dir("sweep");
        const SweepAxis ax = parse_sweep_axis("ring.T=1,4");
        CHECK(ax.key == "ring.T");
        CHECK(ax.values == std::vector<std::string>{"1", "4"});
        CHECK(parse_sweep_axis("detector.band=[1,2],[3,4]").values.size() == 2);
        CHECK_THROWS_AS(parse_sweep_axis("ring.T=1,,2"), ConfigError);

        RunOptions o;
        o.out_dir = dir;
        const RunOutputs out = run_sweep(scenario("fig1a"), {}, {ax}, "rates", 2, o);
        CHECK(fs::exists(dir / "sweep.csv"));
        CHECK(fs::exists(dir / "point_0" / "fig1a.rates.csv"));
        CHECK(fs::exists(dir / "point_1" / "fig1a.rates.csv"));
        CHECK(support::read_file(dir / "sweep.csv") ==
              "point,ring.T,directory\n0,1,point_0\n1,4,point_1\n");
        const std::string m0 = support::read_file(dir / "point_0" / "fig1a.rates.manifest.json");
        CHECK(nlohmann::json::parse(m0)["ring"]["T"] == 1.0);
        CHECK_THROWS_AS(run_sweep(scenario("fig1a"), {}, {}, "rates", 1, o), ConfigError);
    }

    TEST_CASE("command line exit codes")
    {
        const auto dir = support::scratch_dir("cli");
        CHECK(exit_code("rates " + scenario("fig1a").string() + " --out " + dir.string()) == 0);
        CHECK(fs::exists(dir / "fig1a.rates.csv"));
        CHECK(exit_code("rates --config " + scenario("fig1a").string() + " --set ring.N=161 --out " +
                        dir.string()) == 2);
        CHECK(exit_code("rates --config /nonexistent.json") == 2);
        CHECK(exit_code("spectrogram " + scenario("fig1a").string() +
                        " --set detector.theta=1 --set simulation.span=\"20 tau_F\" --out " +
                        dir.string()) == 3);
        CHECK(exit_code("") != 0);
        CHECK(exit_code("--version") == 0);
    }
}
