#include <nvb_cli/commands.hpp>

#include <iostream>

int main(int argc, char ** argv)
{
    return nvb::cli::run(argc, argv, std::cout, std::cerr);
}
