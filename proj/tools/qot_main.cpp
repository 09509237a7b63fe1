#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include <qot/qot.hpp>

namespace {

struct SolveArgs {
    std::string input;
    std::string output;
    std::string trace;
    double delta = 1e-8;
    long max_iters = 1'000'000;
    bool adaptive = false;
};

struct GenerateArgs {
    std::uint64_t seed = 0;
    long d1 = 0;
    long d2 = 0;
    double c_scale = 1.0;
    std::string output;
};

struct VerifyArgs {
    std::string instance;
    std::string solution;
};

int cmd_solve(const SolveArgs& args) {
    const qot::ProblemInstance inst =
        qot::ProblemInstance::validate(qot::io::read_instance_file(args.input));
    qot::SolverConfig cfg;
    cfg.delta = args.delta;
    cfg.max_iters = args.max_iters;
    cfg.step_mode = args.adaptive ? qot::StepMode::Adaptive : qot::StepMode::Fixed;
    const qot::Solution sol = qot::bga_solve(inst, cfg);

    const qot::DualEvaluation final_eval = qot::evaluate_dual(inst, sol.dual_point);
    qot::io::write_json_file(args.output, qot::io::solution_to_json(sol, final_eval.dual));
    if (!args.trace.empty())
        qot::io::write_trace_csv(args.trace, sol.trace);

    std::printf("%s %ld %.17g %.17g %.17g\n", qot::to_string(sol.status), sol.iterations,
                final_eval.dual, qot::frobenius_norm(final_eval.e1),
                qot::frobenius_norm(final_eval.e2));
    return sol.status == qot::SolveStatus::Converged ? 0 : 2;
}

int cmd_generate(const GenerateArgs& args) {
    const qot::ProblemInstance inst =
        qot::random_instance(args.seed, args.d1, args.d2, args.c_scale);
    qot::io::write_instance_file(args.output, inst);
    return 0;
}

int cmd_verify(const VerifyArgs& args) {
    const qot::ProblemInstance inst =
        qot::ProblemInstance::validate(qot::io::read_instance_file(args.instance));
    const qot::io::SolutionFile file = qot::io::read_solution_file(args.solution);

    const qot::DualPoint point{qot::HermitianMatrix::hermitize(file.U),
                               qot::HermitianMatrix::hermitize(file.V)};
    const qot::Coupling stored =
        qot::Coupling::validated(qot::HermitianMatrix::hermitize(file.Gamma));

    const qot::DualEvaluation eval = qot::evaluate_dual(inst, point);
    const double err1 = qot::frobenius_norm(eval.e1);
    const double err2 = qot::frobenius_norm(eval.e2);
    const double primal = qot::primal_value(inst, stored);
    const double gap = std::abs(primal - eval.dual);
    const qot::SpectralEnvelope env = qot::spectral_envelope(inst, eval.dual);
    const bool contained = env.lower <= eval.lambda_min + 1e-9 &&
                           eval.lambda_max <= env.upper + 1e-9;

    const double threshold = 2.0 * qot::SolverConfig{}.delta;
    const bool pass = err1 < threshold && err2 < threshold;

    std::printf("marginal_errors %.17g %.17g\n", err1, err2);
    std::printf("trace_gamma %.17g\n", stored.matrix().trace());
    std::printf("dual_value %.17g\n", eval.dual);
    std::printf("duality_gap %.17g\n", gap);
    std::printf("envelope %.17g %.17g spectrum %.17g %.17g contained %s\n", env.lower,
                env.upper, eval.lambda_min, eval.lambda_max, contained ? "yes" : "no");
    std::printf("verdict %s threshold %.17g\n", pass ? "pass" : "fail", threshold);
    return pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver for entropically regularised quantum optimal transport"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Solve an instance file");
    solve->add_option("--input", solve_args.input, "Instance JSON file")->required();
    solve->add_option("--output", solve_args.output, "Solution JSON file")->required();
    solve->add_option("--trace", solve_args.trace, "Per-half-step trace CSV file");
    solve->add_option("--delta", solve_args.delta, "Stopping tolerance on both marginal-error norms");
    solve->add_option("--max-iters", solve_args.max_iters, "Iteration cap")
        ->check(CLI::PositiveNumber);
    solve->add_flag("--adaptive", solve_args.adaptive,
                    "Recompute step sizes every 25 iterations from the current dual value");

    GenerateArgs gen_args;
    CLI::App* generate = app.add_subcommand("generate", "Write a random valid instance");
    generate->add_option("--seed", gen_args.seed, "RNG seed")->required();
    generate->add_option("--d1", gen_args.d1, "Dimension of the first subsystem")
        ->required()
        ->check(CLI::PositiveNumber);
    generate->add_option("--d2", gen_args.d2, "Dimension of the second subsystem")
        ->required()
        ->check(CLI::PositiveNumber);
    generate->add_option("--c-scale", gen_args.c_scale, "Scale of the random cost matrix")
        ->check(CLI::PositiveNumber);
    generate->add_option("--output", gen_args.output, "Instance JSON file")->required();

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Check a solution file against its instance");
    verify->add_option("--instance", verify_args.instance, "Instance JSON file")->required();
    verify->add_option("--solution", verify_args.solution, "Solution JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (solve->parsed())
            return cmd_solve(solve_args);
        if (generate->parsed())
            return cmd_generate(gen_args);
        return cmd_verify(verify_args);
    } catch (const qot::ValidationError& e) {
        std::fprintf(stderr, "error: %s: %s\n", qot::to_string(e.kind()), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
