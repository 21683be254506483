// Line-delimited JSON proposer used by the external-process tests.
// Reads one request from stdin and answers according to argv[1]:
//   greedy  - cooperate: default model, greedy plan
//   sleep   - stall for 5 s before answering (timeout fixture)
//   garbage - emit a non-JSON line
//   error   - emit an error reply
//   silent  - exit without output
#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "greedy";

  std::string line;
  if (!std::getline(std::cin, line)) return 1;

  if (mode == "silent") return 0;
  if (mode == "garbage") {
    std::cout << "this is not json\n";
    return 0;
  }
  if (mode == "error") {
    std::cout << nlohmann::json({{"error", "stub declines"}}).dump() << "\n";
    return 0;
  }
  if (mode == "sleep") std::this_thread::sleep_for(std::chrono::seconds(5));

  nlohmann::json request = nlohmann::json::parse(line);
  nlohmann::json reply;
  if (request.value("phase", "") == "model") {
    reply["model"] = nlohmann::json::object();
  } else {
    reply["plan"] = {{"algorithm", "greedy"}, {"config", {{"seed", 1}}}};
  }
  std::cout << reply.dump() << "\n";
  return 0;
}
