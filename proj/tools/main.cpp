#include "cli.hpp"

int main(int argc, char** argv) {
  return cca::cli::run_command({argv + 1, argv + argc});
}
