#include "rsr/cli.hpp"

int main(int argc, char** argv)
{
    return rsr::run(argc, argv);
}
