#include "dlrec/search_space.hpp"

namespace dlrec {

namespace {

ComponentSpec exclusive(std::string name, std::string alias, Dimension dim,
                        std::vector<std::string> categories) {
  ComponentSpec c;
  c.name = std::move(name);
  c.dimension = dim;
  c.kind = ComponentKind::CategoricalExclusive;
  c.categories = std::move(categories);
  c.aliases = {std::move(alias)};
  return c;
}

ComponentSpec multi(std::string name, std::string alias, Dimension dim,
                    std::vector<std::string> categories) {
  auto c = exclusive(std::move(name), std::move(alias), dim, std::move(categories));
  c.kind = ComponentKind::CategoricalMultiSelect;
  return c;
}

ComponentSpec range(std::string name, std::string alias, Dimension dim, ComponentKind kind,
                    double lo, double hi, bool log_scale = false, bool searchable = true) {
  ComponentSpec c;
  c.name = std::move(name);
  c.dimension = dim;
  c.kind = kind;
  c.lo = lo;
  c.hi = hi;
  c.log_scale = log_scale;
  c.searchable = searchable;
  c.aliases = {std::move(alias)};
  return c;
}

SearchSpace build_default_space() {
  using D = Dimension;
  using K = ComponentKind;
  std::vector<ComponentSpec> c;

  c.push_back(multi("normalization_layer", "Normalization layer", D::ModelArchitecture,
                    {"Batch Normalization", "Spectral Normalization", "Group Normalization",
                     "Layer Normalization", "Conditional Batch Normalization",
                     "Attentive Normalization", "LayerScale", "Weight Standardization",
                     "Local Response Normalization"}));
  c.push_back(exclusive("initialization", "Initialization", D::ModelArchitecture,
                        {"Kaiming Initialization", "Xavier Initialization",
                         "Fixup Initialization", "LSUV Initialization"}));
  c.push_back(multi("convolution", "Convolution", D::ModelArchitecture,
                    {"Depthwise Convolution", "Grouped Convolution", "Pointwise Convolution",
                     "3x3 Convolution", "Selective Kernel Convolution", "1x1 Convolution",
                     "Depthwise Separable Convolution", "MixConv",
                     "Spatially Separable Convolution", "Gated Convolution"}));
  c.push_back(exclusive("skip_connection", "Skip Connection", D::ModelArchitecture,
                        {"Residual Connection", "Concatenated Skip Connection",
                         "Zero-padded Shortcut Connection", "Deactivable Skip Connection"}));
  c.push_back(multi("activation_function", "Activation Function", D::ModelArchitecture,
                    {"GLU", "ReLU", "CReLU", "Leak ReLU", "Tanh Activation", "GELU", "PReLU",
                     "Sigmoid", "Hard Swish", "Swish", "Sigmoid Activation",
                     "Sigmoid Linear Unit", "Softplus"}));
  c.push_back(multi("pooling_operation", "Pooling Operation", D::ModelArchitecture,
                    {"Spatial Pyramid Pooling", "Average Pooling", "Generalized Mean Pooling",
                     "Global Average Pooling", "Max Pooling", "Center Pooling"}));
  c.push_back(exclusive("feedforward_network", "Feedforward Network", D::ModelArchitecture,
                        {"Dense Connections", "Linear Layer", "Position-Wise Feed-Forward Layer",
                         "Feedforward Network", "Affine Operator"}));
  // The source table lists "Recurrent models of visual attention" twice.
  c.push_back(exclusive("attention_mechanism", "Attention Mechanism", D::ModelArchitecture,
                        {"Scaled Dot-Product Attention", "Recurrent models of visual attention",
                         "Fast Attention Via Positive Orthogonal Random Features",
                         "linear attention mechanism", "Pooling Attention", "Class Attention",
                         "Channel Attention", "Dilated Neighborhood Attention",
                         "Multi-axis Attention", "Channel-wise Soft Attention",
                         "Dilated Sliding Window Attention",
                         "Global and Sliding Window Attention", "Sliding Window Attention",
                         "Multi-Head Attention", "Restricted Self-Attention"}));
  c.push_back(exclusive("output_function", "Output Function", D::ModelArchitecture,
                        {"Softmax", "Heatmap", "Mixture of Logistic Distributions",
                         "Adaptive Softmax", "Extreme Value Machine", "Sparsemax", "PAFs"}));

  c.push_back(exclusive("learning_rate_schedule", "Learning Rate Schedule",
                        D::TrainingOptimization,
                        {"Cosine Annealing", "Linear Warmup With Cosine Annealing",
                         "Linear Warmup With Linear Decay", "Exponential Decay",
                         "Cosine Power Annealing", "Log Decay", "Linear Warmup",
                         "Polynomial Rate Decay"}));
  c.push_back(exclusive("optimization_algorithm", "Optimization algorithm",
                        D::TrainingOptimization,
                        {"AdamW", "SGD", "RMSProp", "LAMB", "AdamP", "AdaGrad", "Adam",
                         "LARS optimizer", "Nesterov momentum optimizer", "SGD with Momentum"}));
  // Millions of parameters.
  c.push_back(range("size_of_parameter", "Size of parameter", D::TrainingOptimization,
                    K::ContinuousRange, 0.18, 632.0, true));
  c.push_back(range("batch_size", "Batch size", D::TrainingOptimization, K::IntegerRange, 32, 8192));
  c.push_back(range("learning_rate", "Learning rate", D::TrainingOptimization,
                    K::ContinuousRange, 0.0000025, 4.8, true));
  c.push_back(range("epochs", "Epochs", D::TrainingOptimization, K::IntegerRange, 20, 5000));

  c.push_back(multi("regularization", "Regularization", D::RegularizationGeneralization,
                    {"Dropout", "Label Smoothing", "Weight Decay", "R1 Regularization",
                     "L1 Regularization", "L2 Regularization", "DropBlock"}));
  c.push_back(multi("data_augmentation", "Data Augmentation", D::RegularizationGeneralization,
                    {"random horizontal flip", "random vertical flip", "random flip",
                     "random translation", "random rotation", "random resized crop",
                     "center crop", "random crop", "colorjitter", "random Lighting Noise",
                     "saturation delta", "random brightness", "solarization", "autoaugment",
                     "randaugment", "convert to gray scale", "random scale", "gaussian blur",
                     "mixup", "cutout", "random erasing", "cutmix", "inception crop"}));

  c.push_back(exclusive("framework", "Framework", D::Framework,
                        {"Caffe", "Caffe2", "tensorflow", "PyTorch"}));

  c.push_back(range("size_of_training_set", "Size of training set", D::Data, K::IntegerRange,
                    2360, 1803460));
  c.push_back(range("size_of_testing_set", "Size of testing set", D::Data, K::IntegerRange,
                    238, 328500));
  c.push_back(range("input_length", "Input Length", D::Data, K::IntegerRange, 16, 512));
  c.push_back(range("output_length", "Output Length", D::Data, K::IntegerRange, 5, 5089));
  c.push_back(range("cosine_similarity", "Cosine similarity", D::Data, K::ContinuousRange,
                    0.0000089407, 0.09754324, false, false));
  c.push_back(range("jensen_shannon", "Jensen-Shannon", D::Data, K::ContinuousRange,
                    0.05358259, 0.408972877, false, false));
  c.push_back(range("l2_distance", "L2 distance", D::Data, K::ContinuousRange, 0.147056907,
                    0.151814908, false, false));

  c.push_back(exclusive("gpu_type", "Type of GPU", D::Hardware,
                        {"TPU-v3", "TPU-v2", "TPUv4", "NVIDIA TESLA K80", "NVIDIA V100",
                         "NVIDIA A100", "NVIDIA A800", "NVIDIA GeForce GTX 1080 Ti",
                         "NVIDIA GeForce RTX 2080 Ti", "NVIDIA GeForce RTX 3090",
                         "NVIDIA GTX 580", "NVIDIA GTX980", "Nvidia RTX 3070", "Tesla P100",
                         "Quadro RTX 8000", "RTX A5000", "Nvidia Tesla K40", "NVIDIA M40",
                         "Titan Xp GPUs", "Titan X GPU", "Nvidia P40 GPUs", "Tesla T4 GPU",
                         "cpu"}));
  c.push_back(range("gpu_count", "Number of GPU", D::Hardware, K::IntegerRange, 1, 60));

  return SearchSpace(std::move(c));
}

}  // namespace

const SearchSpace& default_space() {
  static const SearchSpace space = build_default_space();
  return space;
}

}  // namespace dlrec
