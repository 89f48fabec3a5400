// SPDX-License-Identifier: Apache-2.0
#include "fscs/error.hpp"
#include "fscs/synth.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app {"Generate the synthetic few-shot segmentation dataset"};
    std::string output;
    fscs::SynthParams params;
    app.add_option("output", output, "Dataset root to create")->required();
    app.add_option("--classes", params.num_classes, "Number of classes")->capture_default_str();
    app.add_option("--images", params.num_images, "Number of images")->capture_default_str();
    app.add_option("--width", params.width, "Image width")->capture_default_str();
    app.add_option("--height", params.height, "Image height")->capture_default_str();
    app.add_option("--seed", params.seed, "Generator seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try
    {
        fscs::write_synthetic_dataset(output, params);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << params.num_images << " images of " << params.num_classes << " classes to " << output
              << "\n";
    return 0;
}
