#include <string>
#include <vector>

#include "pqcorr/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return pqcorr::dispatch(args);
}
