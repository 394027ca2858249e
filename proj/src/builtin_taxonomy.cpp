#include "forge/pattern.hpp"

#include "forge/util.hpp"

// Built-in pattern taxonomy: 100 Big Five trait markers (10 per dimension-pole
// cell) and 144 social-cognitive patterns in four categories.

namespace forge {

namespace {

std::vector<TaxonomyEntry> build_taxonomy() {
  std::vector<TaxonomyEntry> out;
  out.reserve(244);
  auto trait = [&](TraitDimension d, TraitPole p, const char* name) {
    out.push_back(TaxonomyEntry{slugify(name), name, PatternKind::trait(d, p)});
  };
  auto social = [&](SocialCategory c, const char* name) {
    out.push_back(TaxonomyEntry{slugify(name), name, PatternKind::social(c)});
  };
  // Extraversion / positive pole
  trait(TraitDimension::Extraversion, TraitPole::Positive, "talkative");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "assertive");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "active");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "energetic");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "outgoing");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "enthusiastic");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "daring");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "gregarious");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "bold");
  trait(TraitDimension::Extraversion, TraitPole::Positive, "spontaneous");
  // Extraversion / negative pole
  trait(TraitDimension::Extraversion, TraitPole::Negative, "quiet");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "reserved");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "shy");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "inhibited");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "timid");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "withdrawn");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "unassertive");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "introverted");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "silent");
  trait(TraitDimension::Extraversion, TraitPole::Negative, "unenergetic");
  // Agreeableness / positive pole
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "sympathetic");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "kind");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "appreciative");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "affectionate");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "soft-hearted");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "warm");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "generous");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "trusting");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "helpful");
  trait(TraitDimension::Agreeableness, TraitPole::Positive, "cooperative");
  // Agreeableness / negative pole
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "cold");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "unsympathetic");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "harsh");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "rude");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "unkind");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "cruel");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "quarrelsome");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "critical");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "antagonistic");
  trait(TraitDimension::Agreeableness, TraitPole::Negative, "callous");
  // Conscientiousness / positive pole
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "organized");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "responsible");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "dependable");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "thorough");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "efficient");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "practical");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "deliberate");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "conscientious");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "neat");
  trait(TraitDimension::Conscientiousness, TraitPole::Positive, "careful");
  // Conscientiousness / negative pole
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "disorganized");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "careless");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "irresponsible");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "undependable");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "sloppy");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "impractical");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "haphazard");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "negligent");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "untidy");
  trait(TraitDimension::Conscientiousness, TraitPole::Negative, "rash");
  // EmotionalStability / positive pole
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "relaxed");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "calm");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "at ease");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "unemotional");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "poised");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "composed");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "secure");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "stable");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "content");
  trait(TraitDimension::EmotionalStability, TraitPole::Positive, "placid");
  // EmotionalStability / negative pole
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "anxious");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "moody");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "envious");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "touchy");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "fretful");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "temperamental");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "insecure");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "nervous");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "jealous");
  trait(TraitDimension::EmotionalStability, TraitPole::Negative, "high-strung");
  // Intellect / positive pole
  trait(TraitDimension::Intellect, TraitPole::Positive, "creative");
  trait(TraitDimension::Intellect, TraitPole::Positive, "imaginative");
  trait(TraitDimension::Intellect, TraitPole::Positive, "intellectual");
  trait(TraitDimension::Intellect, TraitPole::Positive, "philosophical");
  trait(TraitDimension::Intellect, TraitPole::Positive, "complex");
  trait(TraitDimension::Intellect, TraitPole::Positive, "deep");
  trait(TraitDimension::Intellect, TraitPole::Positive, "artistic");
  trait(TraitDimension::Intellect, TraitPole::Positive, "bright");
  trait(TraitDimension::Intellect, TraitPole::Positive, "perceptive");
  trait(TraitDimension::Intellect, TraitPole::Positive, "introspective");
  // Intellect / negative pole
  trait(TraitDimension::Intellect, TraitPole::Negative, "uncreative");
  trait(TraitDimension::Intellect, TraitPole::Negative, "unimaginative");
  trait(TraitDimension::Intellect, TraitPole::Negative, "unintellectual");
  trait(TraitDimension::Intellect, TraitPole::Negative, "unphilosophical");
  trait(TraitDimension::Intellect, TraitPole::Negative, "simple");
  trait(TraitDimension::Intellect, TraitPole::Negative, "shallow");
  trait(TraitDimension::Intellect, TraitPole::Negative, "unartistic");
  trait(TraitDimension::Intellect, TraitPole::Negative, "dull");
  trait(TraitDimension::Intellect, TraitPole::Negative, "imperceptive");
  trait(TraitDimension::Intellect, TraitPole::Negative, "uninquisitive");
  // CognitiveBiasesHeuristics
  social(SocialCategory::CognitiveBiasesHeuristics, "actor-observer asymmetry");
  social(SocialCategory::CognitiveBiasesHeuristics, "defensive attribution hypothesis");
  social(SocialCategory::CognitiveBiasesHeuristics, "effort justification");
  social(SocialCategory::CognitiveBiasesHeuristics, "egocentric bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "false consensus effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "Forer effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "fundamental attribution error");
  social(SocialCategory::CognitiveBiasesHeuristics, "hard-easy effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "illusion of control");
  social(SocialCategory::CognitiveBiasesHeuristics, "illusory superiority");
  social(SocialCategory::CognitiveBiasesHeuristics, "optimism bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "overconfidence effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "risk compensation");
  social(SocialCategory::CognitiveBiasesHeuristics, "self-serving bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "social desirability bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "third-person effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "decoy effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "reactance");
  social(SocialCategory::CognitiveBiasesHeuristics, "social comparison bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "status quo bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "backfire effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "endowment effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "loss aversion");
  social(SocialCategory::CognitiveBiasesHeuristics, "pseudocertainty effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "sunk cost fallacy");
  social(SocialCategory::CognitiveBiasesHeuristics, "zero-risk bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "hyperbolic discounting");
  social(SocialCategory::CognitiveBiasesHeuristics, "identifiable victim effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "ambiguity bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "belief bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "information bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "less-is-better effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "denomination effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "mental accounting");
  social(SocialCategory::CognitiveBiasesHeuristics, "normalcy bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "subadditivity effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "survivorship bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "zero-sum bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "anthropomorphism");
  social(SocialCategory::CognitiveBiasesHeuristics, "illusion of validity");
  social(SocialCategory::CognitiveBiasesHeuristics, "illusory correlation");
  social(SocialCategory::CognitiveBiasesHeuristics, "curse of knowledge");
  social(SocialCategory::CognitiveBiasesHeuristics, "illusion of asymmetric insight");
  social(SocialCategory::CognitiveBiasesHeuristics, "illusion of transparency");
  social(SocialCategory::CognitiveBiasesHeuristics, "spotlight effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "negativity bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "choice-supportive bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "confirmation bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "continued influence effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "expectation bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "observer effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "observer-expectancy effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "ostrich effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "bias blind spot");
  social(SocialCategory::CognitiveBiasesHeuristics, "naive cynicism");
  social(SocialCategory::CognitiveBiasesHeuristics, "naive realism");
  social(SocialCategory::CognitiveBiasesHeuristics, "attentional bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "availability heuristic");
  social(SocialCategory::CognitiveBiasesHeuristics, "base rate fallacy");
  social(SocialCategory::CognitiveBiasesHeuristics, "context effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "empathy gap");
  social(SocialCategory::CognitiveBiasesHeuristics, "illusory truth effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "mere exposure effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "mood-congruent memory bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "omission bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "anchoring");
  social(SocialCategory::CognitiveBiasesHeuristics, "conservatism");
  social(SocialCategory::CognitiveBiasesHeuristics, "contrast effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "distinction bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "focusing effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "framing effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "fading affect bias");
  social(SocialCategory::CognitiveBiasesHeuristics, "implicit association");
  social(SocialCategory::CognitiveBiasesHeuristics, "implicit stereotypes");
  social(SocialCategory::CognitiveBiasesHeuristics, "false memory");
  social(SocialCategory::CognitiveBiasesHeuristics, "misattribution of memory");
  social(SocialCategory::CognitiveBiasesHeuristics, "source confusion");
  social(SocialCategory::CognitiveBiasesHeuristics, "misinformation effect");
  social(SocialCategory::CognitiveBiasesHeuristics, "peak-end rule");
  // SocialInfluence
  social(SocialCategory::SocialInfluence, "authority bias");
  social(SocialCategory::SocialInfluence, "automation bias");
  social(SocialCategory::SocialInfluence, "bandwagon effect");
  social(SocialCategory::SocialInfluence, "group attribution error");
  social(SocialCategory::SocialInfluence, "just-world hypothesis");
  social(SocialCategory::SocialInfluence, "stereotyping");
  social(SocialCategory::SocialInfluence, "ultimate attribution error");
  social(SocialCategory::SocialInfluence, "halo effect");
  social(SocialCategory::SocialInfluence, "in-group bias");
  social(SocialCategory::SocialInfluence, "out-group homogeneity bias");
  social(SocialCategory::SocialInfluence, "positivity effect");
  social(SocialCategory::SocialInfluence, "reactive devaluation");
  social(SocialCategory::SocialInfluence, "hindsight bias");
  social(SocialCategory::SocialInfluence, "impact bias");
  social(SocialCategory::SocialInfluence, "outcome bias");
  social(SocialCategory::SocialInfluence, "pessimism bias");
  social(SocialCategory::SocialInfluence, "planning fallacy");
  social(SocialCategory::SocialInfluence, "projection bias");
  social(SocialCategory::SocialInfluence, "restraint bias");
  social(SocialCategory::SocialInfluence, "self-consistency bias");
  social(SocialCategory::SocialInfluence, "groupthink");
  social(SocialCategory::SocialInfluence, "bystander effect");
  social(SocialCategory::SocialInfluence, "social facilitation");
  social(SocialCategory::SocialInfluence, "diffusion of responsibility");
  social(SocialCategory::SocialInfluence, "conformity");
  social(SocialCategory::SocialInfluence, "obedience to authority");
  social(SocialCategory::SocialInfluence, "reciprocity principle");
  // EvolutionaryAdaptations
  social(SocialCategory::EvolutionaryAdaptations, "delayed reciprocity");
  social(SocialCategory::EvolutionaryAdaptations, "asymmetrical investment");
  social(SocialCategory::EvolutionaryAdaptations, "survival imperative");
  social(SocialCategory::EvolutionaryAdaptations, "aversion response");
  social(SocialCategory::EvolutionaryAdaptations, "kin selection & inclusive fitness");
  social(SocialCategory::EvolutionaryAdaptations, "asymmetrical parental investment");
  social(SocialCategory::EvolutionaryAdaptations, "formation of dominance hierarchies");
  social(SocialCategory::EvolutionaryAdaptations, "territoriality");
  social(SocialCategory::EvolutionaryAdaptations, "mating strategies");
  social(SocialCategory::EvolutionaryAdaptations, "jealousy");
  social(SocialCategory::EvolutionaryAdaptations, "paternity uncertainty");
  // MotivationalProcesses
  social(SocialCategory::MotivationalProcesses, "narrative self");
  social(SocialCategory::MotivationalProcesses, "hedonic adaptation");
  social(SocialCategory::MotivationalProcesses, "self-determination theory");
  social(SocialCategory::MotivationalProcesses, "pleasure principle & reality principle");
  social(SocialCategory::MotivationalProcesses, "search for meaning");
  social(SocialCategory::MotivationalProcesses, "moral licensing effect");
  social(SocialCategory::MotivationalProcesses, "choice overload");
  social(SocialCategory::MotivationalProcesses, "decision fatigue");
  social(SocialCategory::MotivationalProcesses, "awe");
  social(SocialCategory::MotivationalProcesses, "mortality salience & legacy drive");
  social(SocialCategory::MotivationalProcesses, "flow principle");
  social(SocialCategory::MotivationalProcesses, "gratitude mechanism");
  social(SocialCategory::MotivationalProcesses, "post-traumatic growth");
  social(SocialCategory::MotivationalProcesses, "skin hunger & the law of touch");
  social(SocialCategory::MotivationalProcesses, "self-handicapping paradox");
  social(SocialCategory::MotivationalProcesses, "the allure of the forbidden");
  social(SocialCategory::MotivationalProcesses, "sadistic pleasure");
  social(SocialCategory::MotivationalProcesses, "the utility principle of self-deception");
  social(SocialCategory::MotivationalProcesses, "play impulse principle");
  social(SocialCategory::MotivationalProcesses, "attribution theory");
  social(SocialCategory::MotivationalProcesses, "social comparison theory");
  social(SocialCategory::MotivationalProcesses, "self-perception theory");
  social(SocialCategory::MotivationalProcesses, "terror management theory");
  social(SocialCategory::MotivationalProcesses, "cognitive dissonance theory");
  social(SocialCategory::MotivationalProcesses, "psychological reactance theory");
  social(SocialCategory::MotivationalProcesses, "social learning theory");
  social(SocialCategory::MotivationalProcesses, "social identity theory");
  return out;
}

}  // namespace

const std::vector<TaxonomyEntry>& builtin_taxonomy() {
  static const std::vector<TaxonomyEntry> taxonomy = build_taxonomy();
  return taxonomy;
}

}  // namespace forge
