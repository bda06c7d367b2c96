#include <curl/curl.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "bnk/config.hpp"
#include "commands.hpp"

namespace bnk::cli {

namespace {

std::size_t collect(char* data, std::size_t size, std::size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

std::string http_get(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (curl == nullptr) fail(ErrorKind::io, "libcurl initialisation failed");
  std::string body;
  char err[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, collect);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, err);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT, 60L);
  curl_easy_setopt(curl, CURLOPT_USERAGENT, "bnk-fetch/1.0");
  const CURLcode rc = curl_easy_perform(curl);
  long status = 0;
  curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) fail(ErrorKind::io, url + ": " + (err[0] ? err : curl_easy_strerror(rc)));
  if (status != 200) fail(ErrorKind::io, url + ": HTTP " + std::to_string(status));
  return body;
}

std::string today() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", std::gmtime(&now));
  return buf;
}

}  // namespace

int cmd_fetch(const Common& common, const FetchOptions& o) {
  if (!o.allow_network) fail(ErrorKind::usage, "fetch downloads from the network; pass --allow-network to proceed");
  const RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
  std::vector<std::pair<std::string, std::string>> jobs;
  if (o.series != "cpi") jobs.emplace_back(cfg.data.gdp_url, cfg.data.gdp_csv);
  if (o.series != "gdp") jobs.emplace_back(cfg.data.cpi_url, cfg.data.cpi_csv);

  curl_global_init(CURL_GLOBAL_DEFAULT);
  try {
    for (const auto& [url, path] : jobs) {
      const std::string body = http_get(url);
      const QuarterlySeries s = parse_fred_csv(body);  // refuse to store anything unparsable
      const auto parent = std::filesystem::path(path).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      write_file(path, body);
      write_file(path + ".retrieved", today() + " " + url + "\n");
      std::cout << s.id << ": " << s.size() << " quarters " << s.start.to_string() << ".." << s.end().to_string()
                << " -> " << path << "\n";
    }
  } catch (...) {
    curl_global_cleanup();
    throw;
  }
  curl_global_cleanup();
  return 0;
}

}  // namespace bnk::cli
