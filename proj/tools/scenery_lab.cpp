#include "scenery/cli_runner.hpp"

int main(int argc, char** argv) {
    scenery::cli::install_interrupt_handler();
    return scenery::cli::run(argc, argv);
}
