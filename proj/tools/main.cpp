#include "degenflux/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return degenflux::app::run(argc, argv, std::cout, std::cerr); }
