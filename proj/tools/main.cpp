#include <iostream>

#include "cli_app.hpp"

int main(int argc, char** argv) { return esaloha::cli::run(argc, argv, std::cerr); }
