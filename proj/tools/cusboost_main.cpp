#include "cusboost/cli.hpp"

int main(int argc, char** argv) {
    return cusboost::cli_main(argc, argv);
}
