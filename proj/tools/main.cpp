#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rddym/suite.hpp"

int main(int argc, char** argv) {
    CLI::App app{"verification workbench for the two-component rdDym system"};
    app.require_subcommand(1);

    std::string catalog_dir;
    app.add_option("--catalog", catalog_dir, "catalog directory (default: $RDDYM_CATALOG_DIR or ./catalog)");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite = "all";
    std::string format = "text";
    std::string csv_path;
    int parallel = 1;
    verify->add_option("--suite", suite, "one of: all, coverings, reductions, backlund, numeric");
    verify->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--parallel", parallel, "number of worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--csv", csv_path, "dump numeric rows to a csv file");

    auto* list = app.add_subcommand("list", "list catalog entry ids");

    auto* show = app.add_subcommand("show", "pretty-print one catalog entry");
    std::string show_id;
    show->add_option("id", show_id, "catalog entry id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        rddym::Catalog cat = rddym::Catalog::load(rddym::find_catalog_dir(catalog_dir));
        if (*list) {
            for (const auto& id : cat.ids()) std::cout << id << "\n";
            return 0;
        }
        if (*show) {
            std::cout << cat.show(show_id);
            return 0;
        }
        rddym::SuiteRunner runner(cat);
        rddym::SuiteResult result = runner.run(suite, parallel);
        if (format == "json")
            std::cout << rddym::emit_json(result);
        else
            std::cout << rddym::emit_text(result);
        if (!csv_path.empty()) {
            std::ofstream csv(csv_path);
            csv << rddym::emit_csv(result);
        }
        return result.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
