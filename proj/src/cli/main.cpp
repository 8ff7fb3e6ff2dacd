#include <unistd.h>

#include <iostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Animator for CSP interaction-tree semantics of RoboChart-style models"};
    app.require_subcommand(1);
    cli::CliConfig c;
    std::vector<std::string> config;

    auto model = [&](CLI::App* sub) {
        sub->add_option("-m,--model", c.model, "model file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--config", config, "override key=value, repeatable or comma separated");
        sub->add_option("--tau-budget", c.tauBudget, "silent steps allowed between menus")
            ->check(CLI::PositiveNumber);
    };
    auto scenario = [&](CLI::App* sub) {
        model(sub);
        sub->add_option("-s,--scenario", c.scenario, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--max-steps", c.maxSteps, "events to replay; cyclic scenarios default to three cycles");
    };

    auto* animate = app.add_subcommand("animate", "step a model interactively");
    model(animate);
    bool echo = false, noEcho = false;
    animate->add_flag("--echo", echo, "echo choices (default when stdin is not a terminal)");
    animate->add_flag("--no-echo", noEcho, "never echo choices");
    animate->add_flag("--annotate", c.annotate, "follow each echoed choice with the chosen event");

    auto* replay = app.add_subcommand("replay", "replay a scenario printing each step");
    scenario(replay);
    auto* check = app.add_subcommand("check", "check that a scenario is a trace of the model");
    scenario(check);

    auto* laws = app.add_subcommand("laws", "run the operator law property suite");
    laws->add_option("--seed", c.seed, "generator seed");
    laws->add_option("--cases", c.cases, "random cases per law");
    laws->add_option("--depth", c.depth, "depth of generated trees");
    laws->add_option("--eq-depth", c.eqDepth, "depth of the approximate equality");
    laws->add_flag("--broken-merge", c.brokenMerge, "use a merge that violates the identity law");
    laws->add_flag("--serial", c.serial, "use the single-threaded runner");

    auto* explore = app.add_subcommand("explore", "random-walk determinism sweep of a model");
    model(explore);
    explore->add_option("--walks", c.walks, "number of walks");
    explore->add_option("--depth", c.exploreDepth, "events per walk");
    explore->add_option("--seed", c.seed, "walk seed");
    explore->add_flag("--serial", c.serial, "use the single-threaded runner");

    auto* serve = app.add_subcommand("serve", "serve the JSON session API");
    serve->add_option("--host", c.host, "bind address");
    serve->add_option("--port", c.port, "port, 0 picks a free one")->check(CLI::Range(0, 65535));
    serve->add_option("--models-dir", c.modelsDir, "directory of model files")->check(CLI::ExistingDirectory);
    serve->add_option("--static-dir", c.staticDir, "static files served at /")->check(CLI::ExistingDirectory);
    serve->add_option("--idle-timeout", c.idleMinutes, "session idle timeout in minutes");
    serve->add_option("--tau-budget", c.tauBudget, "silent steps allowed between menus")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
        c.overrides = cli::parseOverrides(config);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kUsage;
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kUsage;
    }

    if (*animate)
        return cli::cmdAnimate(c, std::cin, std::cout, std::cerr, !noEcho && (echo || !isatty(STDIN_FILENO)));
    if (*replay)
        return cli::cmdReplay(c, std::cout, std::cerr);
    if (*check)
        return cli::cmdCheck(c, std::cout, std::cerr);
    if (*laws)
        return cli::cmdLaws(c, std::cout, std::cerr);
    if (*explore)
        return cli::cmdExplore(c, std::cout, std::cerr);
    return cli::cmdServe(c, std::cout, std::cerr);
}
