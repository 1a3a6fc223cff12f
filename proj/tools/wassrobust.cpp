#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wassrobust/experiment.hpp"
#include "wassrobust/verification.hpp"

using namespace wassrobust;

namespace {

int verify_duality(std::size_t instances, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0));
    double worst = 0.0;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        const DualityInstance inst = random_duality_instance(rng);
        const DualityCheck r = check_duality(inst);
        worst = std::max(worst, r.gap());
        if (!(r.gap() <= 1e-6)) {
            ++failures;
            std::cout << "instance " << i << ": primal " << format_real(r.primal) << " dual " << format_real(r.dual)
                      << " gap " << format_real(r.gap()) << '\n';
        }
    }
    std::cout << instances << " instances, max gap " << format_real(worst) << ", " << failures << " above 1e-6\n";
    return failures == 0 ? 0 : 1;
}

int grad_check(std::size_t trials, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0));
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) worst = std::max(worst, gradient_check(rng));
    std::cout << trials << " trials, max relative error " << format_real(worst) << '\n';
    return worst <= 1e-6 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wasserstein distributionally robust learning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Train and evaluate the configured algorithms, writing a metrics CSV");
    run->add_option("config", config_path, "Experiment config file")->required();

    std::size_t instances = 100;
    std::uint64_t seed = 0;
    auto* duality = app.add_subcommand("verify-duality", "Compare LP primal and exact dual on random instances");
    duality->add_option("--instances", instances, "Number of random instances");
    duality->add_option("--seed", seed, "Random seed");

    std::size_t trials = 100;
    auto* grad = app.add_subcommand("grad-check", "Compare analytic gradients with central differences");
    grad->add_option("--trials", trials, "Number of random trials");
    grad->add_option("--seed", seed, "Random seed");

    std::string params_path;
    auto* atk = app.add_subcommand("attack-eval", "Evaluate a parameter dump under attack");
    atk->add_option("params-file", params_path, "WRB1 parameter dump")->required();
    atk->add_option("config", config_path, "Experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_experiment(config_path, std::cout, std::cerr);
        if (*duality) return verify_duality(instances, seed);
        if (*grad) return grad_check(trials, seed);
        if (*atk) return attack_eval(params_path, config_path, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
