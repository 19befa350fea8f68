#include "uwbrake/cli.hpp"

#include <iostream>

int main(int argc, char **argv)
{
    return uwbrake::cli::main(argc, argv, std::cout, std::cerr);
}
