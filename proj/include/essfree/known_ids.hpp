#pragma once

// Published id lists for the 3-state, 2-letter census: one id per class of
// non minimally symmetric automata, the ids eliminated by Mikhailova systems,
// the ids eliminated by short rigid-stabilizer words, and the survivors.

#include <vector>

namespace essfree::known {

inline const std::vector<int>& class_list() {
  static const std::vector<int> ids{
      1, 730, 731, 734, 739, 740, 741, 743, 744, 747, 748, 749,
      750, 752, 753, 756, 766, 767, 768, 770, 771, 774, 775, 776,
      777, 779, 780, 783, 802, 803, 804, 806, 807, 810, 820, 821,
      824, 838, 839, 840, 842, 843, 846, 847, 848, 849, 851, 852,
      855, 856, 857, 858, 860, 861, 864, 865, 866, 869, 870, 874,
      875, 876, 878, 879, 882, 883, 884, 885, 887, 888, 891, 919,
      920, 923, 924, 928, 929, 930, 932, 933, 936, 937, 938, 939,
      941, 942, 945, 955, 956, 957, 959, 960, 963, 964, 965, 966,
      968, 969, 972, 1090, 1091, 1094, 2190, 2193, 2196, 2199, 2202, 2203,
      2204, 2205, 2206, 2207, 2209, 2210, 2212, 2213, 2214, 2226, 2229, 2232,
      2233, 2234, 2236, 2237, 2239, 2240, 2241, 2260, 2261, 2262, 2264, 2265,
      2271, 2274, 2277, 2280, 2283, 2284, 2285, 2286, 2287, 2293, 2294, 2295,
      2307, 2313, 2320, 2322, 2352, 2355, 2358, 2361, 2364, 2365, 2366, 2367,
      2368, 2369, 2371, 2372, 2374, 2375, 2376, 2388, 2391, 2394, 2395, 2396,
      2398, 2399, 2401, 2402, 2403, 2422, 2423, 2424, 2426, 2427, 2838, 2841,
      2844, 2847, 2850, 2851, 2852, 2853, 2854, 2860, 2861, 2862, 2874, 2880,
      2887, 2889,
  };
  return ids;
}

inline const std::vector<int>& mikhailova_eliminated() {
  static const std::vector<int> ids{
      741, 744, 749, 753, 776, 777, 779, 840, 843, 849, 852, 856,
      857, 858, 860, 861, 864, 866, 869, 874, 875, 876, 878, 879,
      882, 883, 885, 887, 888, 920, 923, 929, 933, 937, 938, 939,
      941, 942, 945, 955, 956, 957, 959, 960, 963, 965, 969, 2199,
      2202, 2203, 2204, 2207, 2209, 2210, 2213, 2234, 2236, 2239, 2261, 2271,
      2274, 2280, 2283, 2284, 2285, 2287, 2293, 2295, 2307, 2322, 2355, 2361,
      2364, 2365, 2366, 2367, 2369, 2371, 2375, 2395, 2396, 2398, 2399, 2401,
      2402, 2403, 2423, 2427, 2841, 2847, 2850, 2851, 2852,
  };
  return ids;
}

inline const std::vector<int>& brute_force_eliminated() {
  static const std::vector<int> ids{
      739, 740, 743, 747, 748, 750, 752, 756, 775, 780, 783, 838,
      842, 847, 848, 851, 855, 964, 966, 968, 972, 2190, 2205, 2206,
      2212, 2214, 2229, 2233, 2237, 2241, 2262, 2265, 2286, 2352, 2368, 2376,
      2391, 2424, 2838, 2853, 2854, 2860, 2862, 2889,
  };
  return ids;
}

inline const std::vector<int>& survivors() {
  static const std::vector<int> ids{
      1, 730, 731, 734, 766, 767, 768, 770, 771, 774, 802, 803,
      804, 806, 807, 810, 820, 821, 824, 839, 846, 865, 870, 884,
      891, 919, 924, 928, 930, 932, 936, 1090, 1091, 1094, 2193, 2196,
      2226, 2232, 2240, 2260, 2264, 2277, 2294, 2313, 2320, 2358, 2372, 2374,
      2388, 2394, 2422, 2426, 2844, 2861, 2874, 2880, 2887,
  };
  return ids;
}

}  // namespace essfree::known
