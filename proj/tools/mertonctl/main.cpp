#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return mertonctl::run(argc, argv, std::cout, std::cerr); }
