// Copyright 2026 The xsumx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xsumx/external_oracle.h"

#include <gtest/gtest.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "support/oracle_server.h"
#include "test_util.h"
#include "xsumx/fragment_explainer.h"
#include "xsumx/synth.h"
#include "xsumx/toy_oracles.h"

namespace xsumx {
namespace {

using json = nlohmann::ordered_json;
using testing::TempDir;

std::string ServerCommand(const std::string& extra = "") {
  return std::string(XSUMX_ORACLE_SERVER) + " " + extra;
}

SynthCorpus WrittenCorpus(const TempDir& dir, std::size_t videos = 2) {
  SynthConfig cfg;
  cfg.videos = videos;
  SynthCorpus corpus = MakeSynthCorpus(cfg);
  WriteSynthCorpus(&corpus, cfg, dir.path());
  return corpus;
}

TEST(WireFormat, SpecEncodings) {
  EXPECT_EQ(ExternalOracle::SpecToJson(PerturbationSpec::None()).dump(),
            R"({"kind":"none"})");
  EXPECT_EQ(ExternalOracle::SpecToJson(PerturbationSpec::Fragments({2, 0})).dump(),
            R"({"kind":"fragments","masked_fragments":[0,2]})");
  EXPECT_EQ(ExternalOracle::SpecToJson(PerturbationSpec::Objects(3, {7, 1})).dump(),
            R"({"kind":"objects","fragment":3,"masked_objects":[1,7]})");
  for (const auto& spec : {PerturbationSpec::None(), PerturbationSpec::Fragments({1}),
                           PerturbationSpec::Objects(2, {4, 5})}) {
    EXPECT_EQ(testing::SpecFromJson(ExternalOracle::SpecToJson(spec)), spec);
  }
}

TEST(WireFormat, CapsRoundTrip) {
  const OracleCapabilities caps{.fragment_masks = true, .attention = true,
                                .batch_limit = 4};
  EXPECT_EQ(ExternalOracle::CapsFromJson(ExternalOracle::CapsToJson(caps)), caps);
  EXPECT_THROW(ExternalOracle::CapsFromJson(json{{"fragment_masks", true}}),
               OracleError);
}

TEST(ExecOracle, MatchesInProcessScores) {
  TempDir dir;
  const SynthCorpus corpus = WrittenCorpus(dir);
  const auto remote = ExternalOracle::Spawn(ServerCommand("--model toy-norm"));
  const auto local = MakeNormSmoothOracle();
  EXPECT_TRUE(remote->capabilities().fragment_masks);
  EXPECT_FALSE(remote->capabilities().attention);
  for (const VideoBundle& b : corpus.bundles) {
    for (const auto& spec : {PerturbationSpec::None(), PerturbationSpec::Fragments({0, 3}),
                             PerturbationSpec::Fragments({1})}) {
      const auto r = remote->Score(b, spec);
      const auto l = local->Score(b, spec);
      ASSERT_EQ(r.size(), l.size());
      for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], l[i], 1e-12);
    }
  }
}

TEST(ExecOracle, LimeThroughProtocolMatchesInProcess) {
  TempDir dir;
  const SynthCorpus corpus = WrittenCorpus(dir, 1);
  const auto remote = ExternalOracle::Spawn(ServerCommand("--model toy-norm"));
  LimeConfig cfg = LimeConfig::FragmentDefaults();
  const auto a = LimeFragmentExplain(*remote, corpus.bundles[0], cfg, 4);
  const auto b = LimeFragmentExplain(*MakeNormSmoothOracle(), corpus.bundles[0], cfg);
  EXPECT_EQ(a.ranking, b.ranking);
  EXPECT_EQ(a.top.front(), corpus.truth[0].planted_fragment);
}

TEST(ExecOracle, ObjectMasksAndAttention) {
  TempDir dir;
  const SynthCorpus corpus = WrittenCorpus(dir, 1);
  const auto pixel = ExternalOracle::Spawn(ServerCommand("--model pixel"));
  const auto local = MakePixelOracle(GridMeanExtractor(),
                                     std::make_shared<MeanFeatureScorer>());
  const auto spec = PerturbationSpec::Objects(2, {corpus.truth[0].planted_object});
  const auto r = pixel->Score(corpus.bundles[0], spec);
  const auto l = local->Score(corpus.bundles[0], spec);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], l[i], 1e-12);

  const auto att = ExternalOracle::Spawn(ServerCommand("--model toy-attention"));
  EXPECT_EQ(att->Attention(corpus.bundles[0]),
            MakeToyAttentionScorer()->Attention(corpus.bundles[0]));
}

TEST(ExecOracle, ServerErrorsBecomeOracleErrors) {
  TempDir dir;
  const SynthCorpus corpus = WrittenCorpus(dir, 1);
  const auto failing = ExternalOracle::Spawn(ServerCommand("--misbehave fail-scores"));
  EXPECT_THROW(failing->Score(corpus.bundles[0], PerturbationSpec::None()), OracleError);
  const auto wrong_id = ExternalOracle::Spawn(ServerCommand("--misbehave wrong-id"));
  EXPECT_THROW(wrong_id->Score(corpus.bundles[0], PerturbationSpec::None()), OracleError);
  EXPECT_THROW(ExternalOracle::Spawn(ServerCommand("--misbehave wrong-proto")),
               OracleError);
  EXPECT_THROW(ExternalOracle::Spawn("exit 0"), OracleError);
}

TEST(ExecOracle, BundleWithoutPathsIsRejected) {
  const auto remote = ExternalOracle::Spawn(ServerCommand());
  EXPECT_THROW(remote->Score(testing::UniformBundle(2, 2), PerturbationSpec::None()),
               OracleError);
}

TEST(ExecOracle, ManySequentialRequestsStayMatched) {
  TempDir dir;
  const SynthCorpus corpus = WrittenCorpus(dir, 1);
  const auto remote = ExternalOracle::Spawn(ServerCommand());
  const auto local = MakeNormSmoothOracle();
  for (std::size_t t = 0; t < 1000; ++t) {
    const auto spec = PerturbationSpec::Fragments({t % 12});
    ASSERT_EQ(remote->Score(corpus.bundles[0], spec).size(),
              corpus.bundles[0].n_frames());
  }
}

TEST(TcpOracle, ScoresOverSocket) {
  TempDir dir;
  const SynthCorpus corpus = WrittenCorpus(dir, 1);
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(listener, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ASSERT_EQ(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  ASSERT_EQ(::listen(listener, 1), 0);
  socklen_t len = sizeof(addr);
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);

  std::size_t answered = 0;
  std::thread server([&] {
    const int fd = ::accept(listener, nullptr, nullptr);
    FdChannel channel(fd, fd, /*owns_fds=*/true);
    answered = testing::Serve(channel, MakeNormSmoothOracle());
  });
  {
    const auto remote = ExternalOracle::Connect("127.0.0.1:" + std::to_string(port));
    const auto spec = PerturbationSpec::Fragments({4});
    EXPECT_EQ(remote->Score(corpus.bundles[0], spec),
              MakeNormSmoothOracle()->Score(corpus.bundles[0], spec));
  }
  server.join();
  ::close(listener);
  EXPECT_EQ(answered, 3u);  // hello, load, score
}

TEST(TcpOracle, UnreachableAddress) {
  EXPECT_THROW(ExternalOracle::Connect("no-port"), OracleError);
  EXPECT_THROW(ExternalOracle::Connect("127.0.0.1:1"), OracleError);
}

}  // namespace
}  // namespace xsumx
