#include "commands.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "pairdeg/acceptance.hpp"
#include "pairdeg/atlas.hpp"
#include "pairdeg/observables.hpp"

namespace pairdeg::cli {

namespace {

void write_file(const CommandContext& ctx, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(ctx.out_dir);
    const auto path = ctx.out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out << body;
    if (ctx.log) *ctx.log << "wrote " << path.string() << "\n";
}

AtlasOptions atlas_options(const CommandContext& ctx) {
    const auto& p = ctx.config.precision;
    AtlasOptions o;
    o.roots.poly.radius = p.interpolation_radius;
    o.roots.poly.threads = ctx.threads;
    o.roots.cluster_radius = p.cluster_radius;
    o.roots.candidate_radius = p.candidate_radius;
    o.tau_c = p.tau_c;
    o.loop_steps = p.loop_steps;
    return o;
}

}  // namespace

int cmd_atlas(const CommandContext& ctx) {
    const auto& a = ctx.config.atlas;
    const PairingHamiltonian h(ctx.config.model);
    const auto all = build_atlas(h, atlas_options(ctx));
    std::vector<DegeneracyPoint> inside;
    for (const auto& p : all) {
        const cplx g = p.root.g0;
        if (g.real() >= a.re_min && g.real() <= a.re_max && g.imag() >= a.im_min && g.imag() <= a.im_max)
            inside.push_back(p);
    }
    write_file(ctx, "degeneracies.json", atlas_json(inside, ctx.meta));

    const Heatmap map = discriminant_heatmap(h, a.re_min, a.re_max, a.im_min, a.im_max, a.nx, a.ny, ctx.threads);
    std::string csv = ctx.meta.csv_comment() + "g_re,g_im,abs_D\n";
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            const cplx g = map.point(ix, iy);
            csv += fmt::format("{:.17g},{:.17g},{:.17g}\n", g.real(), g.imag(),
                               map.values[static_cast<std::size_t>(iy) * map.nx + ix]);
        }
    write_file(ctx, "heatmap.csv", csv);
    if (ctx.log)
        for (const auto& p : inside)
            *ctx.log << fmt::format("{:<10} g = {}  multiplicity {}\n", to_string(p.kind), format_complex(p.root.g0),
                                    p.root.multiplicity);
    return 0;
}

int cmd_sweep(const CommandContext& ctx) {
    const auto& s = ctx.config.sweep;
    SweepOptions o;
    o.atlas = atlas_options(ctx);
    o.merge_radius = s.merge_radius;
    o.threads = ctx.threads;
    const auto traj = sweep_gamma(ctx.config.model, s.gamma_min, s.gamma_max, s.steps, o);
    write_file(ctx, "trajectory.csv", trajectory_csv(traj, ctx.meta));
    write_file(ctx, "trajectory.json", trajectory_json(traj, ctx.meta));
    write_file(ctx, "events.json", events_json(traj, ctx.meta));
    if (ctx.log)
        for (const auto& e : traj.events)
            *ctx.log << fmt::format("coalescence at gamma = {:.10f}, g = {}\n", e.gamma, format_complex(e.g));
    return 0;
}

int cmd_encircle(const CommandContext& ctx) {
    const auto& e = ctx.config.encircle;
    const PairingHamiltonian h(ctx.config.model);
    const auto options = atlas_options(ctx);
    const auto roots = find_degeneracies(h, options.roots);
    LoopSpec loop{{e.center_re, e.center_im}, e.radius, ctx.config.precision.loop_steps, e.loops, e.orientation};
    const LoopOptions lo{options.tau_c, ctx.config.precision.max_bisections, roots};
    const LoopTrace trace = trace_loop(h, loop, lo);
    const RestorePeriods periods = restore_count(h, loop, e.max_loops, lo);
    write_file(ctx, "phases.csv", loop_trace_csv(trace, ctx.meta));
    write_file(ctx, "summary.json", loop_summary_json(trace, periods, ctx.meta));
    if (ctx.log)
        *ctx.log << fmt::format("permutation {}; eigenvalue period {}; phase period {}\n",
                                cycle_notation(trace.single_loop_permutation()),
                                periods.eigenvalue_period ? std::to_string(*periods.eigenvalue_period) : "none",
                                periods.phase_period ? std::to_string(*periods.phase_period) : "none");
    return 0;
}

int cmd_cut(const CommandContext& ctx) {
    const auto& c = ctx.config.cut;
    const PairingHamiltonian h(ctx.config.model);
    const auto points = segment_points({c.re_min, c.im}, {c.re_max, c.im}, c.samples);
    const ContinuationOptions co{ctx.config.precision.tau_c, ctx.config.precision.max_bisections, true};
    const CutTable table = continue_along(h, points, co);
    write_file(ctx, "spectrum_cut.csv", cut_table_csv(table, ctx.meta));
    const PairingCut cut = pairing_energy_cut(h, points, {c.pair[0] - 1, c.pair[1] - 1});
    write_file(ctx, "pairing_cut.csv", pairing_cut_csv(cut, ctx.meta));
    if (ctx.log && !table.flags.empty())
        *ctx.log << fmt::format("{} continuation steps needed refinement\n", table.flags.size());
    return 0;
}

int cmd_selftest(const CommandContext& ctx) {
    AcceptanceOptions o;
    o.threads = ctx.threads;
    const auto results = run_acceptance(o);
    int failed = 0;
    for (const auto& r : results) {
        if (ctx.log) *ctx.log << format_result(r) << "\n";
        failed += r.passed ? 0 : 1;
    }
    if (ctx.log) *ctx.log << fmt::format("{} criteria, {} failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace pairdeg::cli
