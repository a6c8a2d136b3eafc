#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "scr/core/log.hpp"

int main(int argc, char** argv)
{
    scr::log::set_quiet(true);
    doctest::Context context(argc, argv);
    return context.run();
}
