#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "illusionpad/error.hpp"
#include "illusionpad/perception.hpp"
#include "illusionpad/safety.hpp"
#include "illusionpad/serialize.hpp"
#include "illusionpad/service.hpp"
#include "illusionpad/spectral.hpp"
#include "illusionpad/visibility.hpp"

namespace illusionpad {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kWorkingWidth = 360;

struct PositionArgs {
    std::optional<double> r, x, y, z;
    std::optional<std::string> theta, phi;

    void add_to(CLI::App* app) {
        app->add_option("--r", r, "distance from the display center, inches");
        app->add_option("--theta", theta, "polar angle from +y (radians, or e.g. 90deg)");
        app->add_option("--phi", phi, "azimuth in the xz plane (radians, or e.g. 30deg)");
        app->add_option("--x", x, "cartesian position, inches");
        app->add_option("--y", y);
        app->add_option("--z", z);
    }

    ViewingPosition resolve() const {
        const bool spherical = r || theta || phi;
        const bool cartesian = x || y || z;
        if (spherical == cartesian) throw InputError("give the position as --r/--theta/--phi or as --x/--y/--z");
        if (spherical) {
            if (!r || !theta || !phi) throw InputError("--r, --theta and --phi are all required");
            return spherical_to_cartesian(*r, parse_angle(*theta), parse_angle(*phi));
        }
        if (!x || !y || !z) throw InputError("--x, --y and --z are all required");
        return {*x, *y, *z};
    }
};

struct KeypadArgs {
    std::string device = "nexus6";
    std::string category;
    std::optional<double> sigma_lf;
    std::optional<double> sigma_hf;
    std::uint64_t seed = 0;

    void add_to(CLI::App* app) {
        app->add_option("--device", device, "preset name or profile JSON path")->capture_default_str();
        app->add_option("--category", category, "c1..c4 sigma preset");
        app->add_option("--sigma-lf", sigma_lf, "low-pass sigma, c/im");
        app->add_option("--sigma-hf", sigma_hf, "high-pass sigma, c/im");
        app->add_option("--seed", seed, "shuffle seed")->capture_default_str();
    }

    KeypadRequest request() const {
        KeypadRequest req;
        req.device = device;
        req.seed = seed;
        if (!category.empty()) {
            const auto& c = keypad_category(category);
            req.category = c.name;
            req.sigma_lf = c.sigma_lf;
            req.sigma_hf = c.sigma_hf;
        } else if (!sigma_hf) {
            throw InputError("give --category or --sigma-hf");
        }
        if (sigma_lf) req.sigma_lf = *sigma_lf;
        if (sigma_hf) req.sigma_hf = *sigma_hf;
        return req;
    }
};

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

HybridKeypad load_bundle(const fs::path& dir, int width) {
    return keypad_from_metadata(read_json_file(dir / "metadata.json"), width);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid-image PIN keypads: generation, perception simulation, visibility and safety distances",
                 "illusionpad"};
    app.require_subcommand(1);
    app.fallthrough();
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    std::function<int()> action;

    // generate
    KeypadArgs gen_keypad;
    std::string gen_out = ".";
    std::optional<int> gen_width;
    auto* gen = app.add_subcommand("generate", "render a hybrid keypad bundle");
    gen_keypad.add_to(gen);
    gen->add_option("--out", gen_out, "output directory")->capture_default_str();
    gen->add_option("--width", gen_width, "pixel grid width (native when omitted)");
    gen->callback([&] {
        action = [&] {
            KeypadRequest req = gen_keypad.request();
            req.width = gen_width;
            const HybridKeypad keypad = build_keypad(req);
            const json metadata = keypad_metadata(keypad, req.seed, req.category);
            const fs::path dir(gen_out);
            fs::create_directories(dir);
            write_png(dir / "hybrid.png", keypad.hybrid.composed);
            write_png(dir / "user_high.png", keypad.hybrid.user_high, 0.5);
            write_png(dir / "surfer_low.png", keypad.hybrid.surfer_low);
            write_file_atomic(dir / "layout.json", dump(to_json(keypad.layout)));
            write_file_atomic(dir / "metadata.json", dump(metadata));
            if (as_json)
                out << dump({{"schema_version", kSchemaVersion},
                             {"out", dir.string()},
                             {"files", {"hybrid.png", "user_high.png", "surfer_low.png", "layout.json", "metadata.json"}},
                             {"metadata", metadata}});
            else
                out << "wrote " << dir.string() << " (" << keypad.hybrid.composed.width() << "x"
                    << keypad.hybrid.composed.height() << ", sigma_lf=" << keypad.sigma_lf
                    << ", sigma_hf=" << keypad.sigma_hf << ")\n";
            return kExitOk;
        };
    });

    // simulate
    std::string sim_input, sim_out = "perceived.png", sim_device = "nexus6";
    std::optional<std::string> sim_report;
    std::optional<int> sim_width;
    PositionArgs sim_pos;
    auto* sim = app.add_subcommand("simulate", "perceived image of a PNG from a viewing position");
    sim->add_option("--input", sim_input, "input PNG")->required();
    sim->add_option("--out", sim_out, "perceived PNG")->capture_default_str();
    sim->add_option("--report", sim_report, "JSON echo (defaults to the output path with .json)");
    sim->add_option("--device", sim_device, "preset name or profile JSON path")->capture_default_str();
    sim->add_option("--width", sim_width, "display pixel grid width (native when omitted)");
    sim_pos.add_to(sim);
    sim->callback([&] {
        action = [&] {
            const ViewingPosition pos = sim_pos.resolve();
            DeviceProfile device = resolve_device(sim_device);
            if (sim_width) device = device.at_working_width(*sim_width);
            const GrayImage image = read_png(sim_input);
            const PerceptionParams params = perception_params(device.display, pos, DafSpec{});
            const GrayImage perceived = simulate_perception(image, device.display, pos);
            const json report = {{"schema_version", kSchemaVersion},
                                 {"position", position_json(pos)},
                                 {"device", device.name},
                                 {"f1", params.f1},
                                 {"f0", params.f0},
                                 {"theta_x", params.angle.theta_x},
                                 {"theta_y", params.angle.theta_y},
                                 {"extrapolated_angles", params.extrapolated}};
            write_png(sim_out, perceived);
            write_file_atomic(sim_report.value_or(fs::path(sim_out).replace_extension(".json").string()), dump(report));
            if (params.extrapolated) log_warning("viewing angles lie outside the calibrated range");
            if (as_json)
                out << dump(report);
            else
                out << "f1=" << fixed(params.f1, 3) << " c/d, theta_x=" << fixed(degrees(params.angle.theta_x), 3)
                    << " deg, theta_y=" << fixed(degrees(params.angle.theta_y), 3) << " deg -> " << sim_out << "\n";
            return kExitOk;
        };
    });

    // visibility
    std::string vis_bundle;
    double vis_vth = kDefaultVisibilityThreshold;
    int vis_width = kWorkingWidth;
    PositionArgs vis_pos;
    auto* vis = app.add_subcommand("visibility", "visibility index and verdict for a keypad bundle");
    vis->add_option("--bundle", vis_bundle, "directory written by generate")->required();
    vis->add_option("--v-th", vis_vth, "visibility threshold")->capture_default_str();
    vis->add_option("--width", vis_width, "working pixel grid width")->capture_default_str();
    vis_pos.add_to(vis);
    vis->callback([&] {
        action = [&] {
            const ViewingPosition pos = vis_pos.resolve();
            const HybridKeypad keypad = load_bundle(vis_bundle, vis_width);
            const VisibilityDetail detail = VisibilityEvaluator(keypad).evaluate(pos);
            const VisibilityVerdict v = verdict(detail.index_v, vis_vth, pos, detail.perception.extrapolated);
            if (v.extrapolated_angles) log_warning("viewing angles lie outside the calibrated range");
            if (as_json) {
                json j = verdict_json(v, keypad);
                j["per_button"] = detail.per_button;
                out << dump(j);
            } else {
                out << "v=" << fixed(v.index_v, 4) << " v_th=" << v.threshold_v_th
                    << (v.visible ? " visible\n" : " not visible\n");
            }
            return kExitOk;
        };
    });

    // region
    std::string reg_bundle, reg_out = "region.csv", reg_grid = "20x20x20";
    std::optional<std::string> reg_slice;
    std::vector<double> reg_x{-30, 30}, reg_y{-30, 30}, reg_z{6, 90};
    double reg_vth = kDefaultVisibilityThreshold;
    int reg_width = kWorkingWidth;
    auto* reg = app.add_subcommand("region", "visibility verdict over a 3D grid of positions");
    reg->add_option("--bundle", reg_bundle, "directory written by generate")->required();
    reg->add_option("--grid", reg_grid, "NXxNYxNZ node counts")->capture_default_str();
    reg->add_option("--x-range", reg_x, "min max, inches")->expected(2);
    reg->add_option("--y-range", reg_y, "min max, inches")->expected(2);
    reg->add_option("--z-range", reg_z, "min max, inches (> 5)")->expected(2);
    reg->add_option("--out", reg_out, "CSV point cloud")->capture_default_str();
    reg->add_option("--slice", reg_slice, "PNG mask of the zx plane nearest y = 0");
    reg->add_option("--v-th", reg_vth, "visibility threshold")->capture_default_str();
    reg->add_option("--width", reg_width, "working pixel grid width")->capture_default_str();
    reg->callback([&] {
        action = [&] {
            GridSpec grid;
            char sep1 = 0, sep2 = 0;
            std::istringstream g(reg_grid);
            if (!(g >> grid.x.count >> sep1 >> grid.y.count >> sep2 >> grid.z.count) || sep1 != 'x' || sep2 != 'x' ||
                !g.eof())
                throw InputError("--grid must look like 20x20x20");
            grid.x.min = reg_x[0], grid.x.max = reg_x[1];
            grid.y.min = reg_y[0], grid.y.max = reg_y[1];
            grid.z.min = reg_z[0], grid.z.max = reg_z[1];
            const HybridKeypad keypad = load_bundle(reg_bundle, reg_width);
            const VisibilityRegion region = visibility_region(VisibilityEvaluator(keypad), grid, reg_vth);
            write_file_atomic(reg_out, region_csv(region));
            if (reg_slice) write_png(*reg_slice, region_slice_zx(region));
            const json summary = region_summary_json(region);
            if (as_json) {
                out << dump(summary);
            } else {
                out << summary["visible_cells"].get<size_t>() << " of " << region.cells.size()
                    << " positions see the user's keypad -> " << reg_out << "\n";
            }
            return kExitOk;
        };
    });

    // safety
    std::string saf_mode = "naked-eye";
    std::optional<std::string> saf_bundle;
    KeypadArgs saf_keypad;
    double saf_vth = kDefaultVisibilityThreshold;
    int saf_width = kWorkingWidth;
    std::optional<double> saf_target;
    std::string saf_theta = "90deg", saf_phi = "30deg";
    auto* saf = app.add_subcommand("safety", "safety distance (naked eye or camera) or the sigma for a target distance");
    saf->add_option("--mode", saf_mode, "naked-eye, camera or solve")
        ->check(CLI::IsMember({"naked-eye", "camera", "solve"}))
        ->capture_default_str();
    saf->add_option("--bundle", saf_bundle, "directory written by generate");
    saf_keypad.add_to(saf);
    saf->add_option("--v-th", saf_vth, "visibility threshold")->capture_default_str();
    saf->add_option("--width", saf_width, "working pixel grid width")->capture_default_str();
    saf->add_option("--target-ds", saf_target, "solve mode: safety distance to reach, inches");
    saf->add_option("--theta", saf_theta, "search ray polar angle")->capture_default_str();
    saf->add_option("--phi", saf_phi, "search ray azimuth")->capture_default_str();
    saf->callback([&] {
        action = [&] {
            const auto bundle_metadata = [&] { return read_json_file(fs::path(*saf_bundle) / "metadata.json"); };
            if (saf_mode == "camera") {
                DeviceProfile device;
                double sigma_hf = 0.0;
                if (saf_bundle) {
                    const json m = bundle_metadata();
                    device = device_from_json(m.at("device"));
                    sigma_hf = m.at("sigma_hf").get<double>();
                } else {
                    const KeypadRequest req = saf_keypad.request();
                    device = resolve_device(req.device);
                    sigma_hf = req.sigma_hf;
                }
                const SafetyResult r = camera_safety_distance(sigma_hf, device);
                if (as_json)
                    out << dump(safety_json(r));
                else
                    out << "camera d_s=" << fixed(r.d_s, 2) << " in (l_x=" << fixed(r.cutoff->l_x, 4)
                        << " in, l_y=" << fixed(r.cutoff->l_y, 4) << " in)\n";
                return kExitOk;
            }
            if (saf_mode == "solve") {
                if (!saf_target) throw InputError("--mode solve needs --target-ds");
                const double sigma_lf = saf_keypad.sigma_lf.value_or(
                    saf_keypad.category.empty() ? kDefaultSigmaLf : keypad_category(saf_keypad.category).sigma_lf);
                const DeviceProfile device = resolve_device(saf_keypad.device).at_working_width(saf_width);
                SigmaSearch search;
                search.theta0 = parse_angle(saf_theta);
                search.phi0 = parse_angle(saf_phi);
                const SigmaSolution s = solve_sigma_hf(*saf_target, device, sigma_lf, saf_vth, search);
                json trace = json::array();
                for (const auto& t : s.trace) trace.push_back({{"sigma_hf", t.sigma_hf}, {"v", t.v}});
                if (as_json)
                    out << dump({{"schema_version", kSchemaVersion},
                                 {"target_ds_in", *saf_target},
                                 {"sigma_lf", sigma_lf},
                                 {"sigma_hf", s.sigma_hf},
                                 {"v", s.v},
                                 {"trace", trace}});
                else
                    out << "sigma_hf=" << fixed(s.sigma_hf, 1) << " c/im reaches v=" << fixed(s.v, 4) << " at "
                        << *saf_target << " in\n";
                return kExitOk;
            }
            const HybridKeypad keypad = [&] {
                if (saf_bundle) return load_bundle(*saf_bundle, saf_width);
                KeypadRequest req = saf_keypad.request();
                req.width = saf_width;
                return build_keypad(req);
            }();
            DistanceSearch search;
            search.theta0 = parse_angle(saf_theta);
            search.phi0 = parse_angle(saf_phi);
            const SafetyResult r = naked_eye_safety_distance(keypad, saf_vth, search);
            if (as_json)
                out << dump(safety_json(r));
            else
                out << "naked-eye d_s=" << fixed(r.d_s, 2) << " in" << (r.unbounded ? " (threshold never reached)" : "")
                    << "\n";
            return kExitOk;
        };
    });

    // spectrum
    std::string spec_input, spec_out = "spectrum.csv", spec_device = "nexus6";
    std::optional<int> spec_width;
    double spec_bucket = 0.5;
    PositionArgs spec_pos;
    auto* spc = app.add_subcommand("spectrum", "radial log-magnitude spectrum of a PNG as CSV");
    spc->add_option("--input", spec_input, "input PNG")->required();
    spc->add_option("--out", spec_out, "CSV path")->capture_default_str();
    spc->add_option("--device", spec_device, "display for perceived (c/d) spectra")->capture_default_str();
    spc->add_option("--width", spec_width, "display pixel grid width (native when omitted)");
    spc->add_option("--bucket", spec_bucket, "c/d bucket width for perceived spectra")->capture_default_str();
    spec_pos.add_to(spc);
    spc->callback([&] {
        action = [&] {
            const GrayImage image = read_png(spec_input);
            const bool perceived = spec_pos.r || spec_pos.theta || spec_pos.phi || spec_pos.x || spec_pos.y || spec_pos.z;
            std::string csv;
            size_t rows = 0;
            if (perceived) {
                DeviceProfile device = resolve_device(spec_device);
                if (spec_width) device = device.at_working_width(*spec_width);
                const auto p = perceived_spectrum_profile(image, device.display, spec_pos.resolve(), spec_bucket);
                csv = profile_csv(p, "magnitude_c_per_deg");
                rows = p.size();
            } else {
                const auto p = spectrum_profile(image);
                csv = profile_csv(p);
                rows = p.size();
            }
            write_file_atomic(spec_out, csv);
            if (as_json)
                out << dump({{"schema_version", kSchemaVersion}, {"out", spec_out}, {"rows", rows}});
            else
                out << rows << " buckets -> " << spec_out << "\n";
            return kExitOk;
        };
    });

    // serve
    std::string srv_host = "127.0.0.1";
    int srv_port = 8080;
    if (const char* env = std::getenv("ILLUSIONPAD_PORT")) srv_port = std::atoi(env);
    int srv_width = kWorkingWidth;
    auto* srv = app.add_subcommand("serve", "HTTP JSON/PNG service");
    srv->add_option("--host", srv_host)->capture_default_str();
    srv->add_option("--port", srv_port, "defaults to $ILLUSIONPAD_PORT or 8080")->capture_default_str();
    srv->add_option("--working-width", srv_width, "pixel grid width for simulations and sessions")
        ->capture_default_str();
    srv->callback([&] {
        action = [&] {
            ServiceOptions options;
            options.working_width = srv_width;
            Service service(options);
            HttpServer server(service);
            const int port = server.bind(srv_host, srv_port);
            err << "listening on http://" << srv_host << ":" << port << "\n";
            server.listen();
            return kExitOk;
        };
    });

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("illusionpad");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const SearchError& e) {
        err << "error: " << e.what() << "\n";
        return kExitSearch;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace illusionpad
