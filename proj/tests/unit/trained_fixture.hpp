#pragma once

#include "scr/data/holdout.hpp"
#include "scr/data/synth.hpp"
#include "scr/textenc/text_encoder.hpp"
#include "scr/vae/click_vae.hpp"

// A small planted-style dataset with a conditioned and an unconditioned model
// trained on it, shared by the tests that need trained weights.
struct TrainedFixture {
    scr::data::SynthDataset synth;
    scr::data::HoldoutSplit split;
    scr::textenc::TextEncoderModel text;
    scr::vae::ClickVaeModel conditioned;
    scr::vae::ClickVaeModel unconditioned;
    scr::vae::VaeTrainReport conditioned_report;
};

const TrainedFixture& trained_fixture();
