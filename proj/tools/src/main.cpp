#include <iostream>
#include <string>
#include <vector>

#include "precoh_cli/cli.hpp"

namespace {

void print_usage() {
    std::cout <<
        "precoh " << precoh::cli::kVersion << "\n"
        "usage: precoh <command> [--key value ...] [--config FILE]\n"
        "\n"
        "commands:\n"
        "  collapse    Brownian race of channel probabilities to absorption\n"
        "  kpp         reaction-diffusion front on a grid (free or moving boundary)\n"
        "  front-walk  duplication walk of intricate atoms across planes\n"
        "  scatter     single-collision density-matrix split and trace checks\n"
        "  omega       collision-sourced fluctuation dynamics vs. the isolated state\n"
        "  scenario    named measurement setup run through the collapse engine\n"
        "  timescale   collapse-timescale estimate from track parameters\n"
        "\n"
        "common flags: --seed N (required), --output-dir PATH, --config FILE\n"
        "flags override config-file values; PRECOH_OUTPUT_DIR sets the output\n"
        "directory default.\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        print_usage();
        return args.empty() ? 1 : 0;
    }
    if (args[0] == "--version") {
        std::cout << precoh::cli::kVersion << "\n";
        return 0;
    }
    return precoh::cli::run(args);
}
