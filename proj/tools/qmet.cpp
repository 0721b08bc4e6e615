#include "app.hpp"

int main(int argc, char** argv) { return qmet::app::run(argc, argv); }
