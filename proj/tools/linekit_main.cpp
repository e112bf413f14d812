#include <iostream>

#include "linekit/cli.hpp"

int main(int argc, char** argv)
{
    return linekit::cli::run(argc, argv, std::cout, std::cerr);
}
