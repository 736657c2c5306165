#pragma once

#include <string_view>

// Text resources compiled in from data/ at configure time.
namespace drmine::resources {

std::string_view default_stopwords_text();
std::string_view default_cluster_rules_text();
std::string_view default_drill_rules_text();

}  // namespace drmine::resources
