// Mines a toy header chain and writes it in the oracle fixture format.
//
//   make_header_fixture --count 20 --difficulty 1e-6 --out chain.txt

#include "hashalloc/oracle.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Write a mined header chain fixture"};
    std::int64_t genesis_height = 0;
    std::size_t count = 10;
    std::vector<double> difficulties{1e-6};
    std::int64_t start_time = 1'600'000'000;
    std::int64_t spacing = 600;
    std::string out;
    app.add_option("--genesis-height", genesis_height)->capture_default_str();
    app.add_option("--count", count, "Headers including genesis")->capture_default_str();
    app.add_option("--difficulty", difficulties,
                   "Difficulty per header; the last value repeats")
        ->capture_default_str();
    app.add_option("--start-time", start_time)->capture_default_str();
    app.add_option("--spacing", spacing, "Seconds between headers")->capture_default_str();
    app.add_option("--out", out, "Output path (default stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    try {
        const auto chain =
            hashalloc::oracle::mine_chain(genesis_height, count, difficulties, start_time, spacing);
        if (out.empty()) {
            hashalloc::oracle::write_fixture(std::cout, chain);
        } else {
            std::ofstream f(out);
            if (!f) {
                std::cerr << "make_header_fixture: cannot open " << out << '\n';
                return 2;
            }
            hashalloc::oracle::write_fixture(f, chain);
        }
    } catch (const std::exception& e) {
        std::cerr << "make_header_fixture: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
