// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "fscs/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app {"Training-free few-shot classification and segmentation"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> overrides;
    std::string output;
    app.add_option("--config", config_file, "JSON config file");
    app.add_option("--set", overrides, "Override a config value: key.path=value")->expected(1)->take_all();
    app.add_option("--output", output, "Output directory");

    auto* sample = app.add_subcommand("sample", "Sample episodes into an episode list");
    auto* run = app.add_subcommand("run", "Run the agent over episodes and record transcripts");
    auto* render = app.add_subcommand("render", "Write the visual prompts of one episode");
    auto* eval = app.add_subcommand("eval", "Score transcripts and write reports");

    std::string episode_id;
    render->add_option("episode_id", episode_id, "Episode id")->required();
    std::string transcripts_dir;
    eval->add_option("transcripts", transcripts_dir, "Transcript directory (default: <output>/transcripts)");

    for (auto* sub: {sample, run, render, eval})
    {
        sub->add_option("--config", config_file, "JSON config file");
        sub->add_option("--set", overrides, "Override a config value: key.path=value")->expected(1)->take_all();
        sub->add_option("--output", output, "Output directory");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        auto const code = app.exit(e);
        return code == 0 ? 0 : fscs::cli::exit_config;
    }

    try
    {
        auto json = fscs::cli::merge_config(config_file, overrides);
        if (!output.empty())
            json["output"] = output;
        auto const config = fscs::cli::run_config_from_json(json);

        if (sample->parsed())
            return fscs::cli::cmd_sample(config, std::cout);
        if (run->parsed())
            return fscs::cli::cmd_run(config, std::cout);
        if (render->parsed())
            return fscs::cli::cmd_render(config, episode_id, std::cout);
        return fscs::cli::cmd_eval(config, transcripts_dir, std::cout);
    }
    catch (const fscs::Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return fscs::cli::exit_code_for(e.code());
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return fscs::cli::exit_internal;
    }
}
