#include <iostream>

#include "otsuki/cli.hpp"

int main(int argc, char** argv)
{
    return otsuki::run_cli(argc, argv, std::cout, std::cerr);
}
