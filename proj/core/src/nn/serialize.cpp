#include "hat/nn/serialize.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "hat/error.hpp"

namespace hat::nn {
namespace {

constexpr std::uint32_t kMagic = 0x4D544148u;  // "HATM" little-endian
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
    float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    put_u32(out, bits);
}

class Reader {
  public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        if (pos_ + 4 > bytes_.size()) throw ProtocolError("model image truncated");
        std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    double f32() {
        std::uint32_t bits = u32();
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        return static_cast<double>(f);
    }

    bool done() const { return pos_ == bytes_.size(); }

  private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

void put_params(std::vector<std::uint8_t>& out, const DenseLayer& layer) {
    for (double w : layer.weights()) put_f32(out, w);
    for (double b : layer.bias()) put_f32(out, b);
}

void read_params(Reader& r, DenseLayer& layer) {
    for (double& w : layer.weights()) w = r.f32();
    for (double& b : layer.bias()) b = r.f32();
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const NetModel& model) {
    std::vector<std::uint8_t> out;
    put_u32(out, kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(model.encoder().size()));
    for (const DenseLayer& layer : model.encoder()) {
        put_u32(out, static_cast<std::uint32_t>(layer.spec().input_dim));
        put_u32(out, static_cast<std::uint32_t>(layer.spec().output_dim));
        put_u32(out, layer.spec().activation == Activation::kRelu ? 1u : 0u);
    }
    put_u32(out, static_cast<std::uint32_t>(model.classifier().spec().input_dim));
    put_u32(out, static_cast<std::uint32_t>(model.classifier().spec().output_dim));
    put_u32(out, static_cast<std::uint32_t>(model.label_space().size()));
    for (int id : model.label_space()) put_i32(out, id);
    for (const DenseLayer& layer : model.encoder()) put_params(out, layer);
    put_params(out, model.classifier());
    return out;
}

NetModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (r.u32() != kMagic) throw ProtocolError("bad model image magic");
    if (r.u32() != kVersion) throw ProtocolError("unsupported model image version");
    std::uint32_t n_layers = r.u32();
    if (n_layers == 0 || n_layers > 64) throw ProtocolError("bad encoder layer count");
    std::vector<DenseLayer> encoder;
    encoder.reserve(n_layers);
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        LayerSpec spec;
        spec.input_dim = static_cast<int>(r.u32());
        spec.output_dim = static_cast<int>(r.u32());
        std::uint32_t act = r.u32();
        if (act > 1) throw ProtocolError("bad activation code");
        spec.activation = act == 1 ? Activation::kRelu : Activation::kIdentity;
        encoder.emplace_back(spec);
    }
    LayerSpec cls_spec;
    cls_spec.input_dim = static_cast<int>(r.u32());
    cls_spec.output_dim = static_cast<int>(r.u32());
    cls_spec.activation = Activation::kIdentity;
    DenseLayer classifier(cls_spec);
    std::uint32_t n_labels = r.u32();
    if (n_labels == 0 || n_labels > 1u << 20) throw ProtocolError("bad label count");
    std::vector<int> labels(n_labels);
    for (std::uint32_t i = 0; i < n_labels; ++i) labels[i] = r.i32();
    for (DenseLayer& layer : encoder) read_params(r, layer);
    read_params(r, classifier);
    if (!r.done()) throw ProtocolError("trailing bytes in model image");
    return NetModel(std::move(encoder), std::move(classifier), std::move(labels));
}

void save_model(const NetModel& model, const std::string& path) {
    std::vector<std::uint8_t> bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ProtocolError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ProtocolError("write failed for " + path);
}

NetModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProtocolError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace hat::nn
