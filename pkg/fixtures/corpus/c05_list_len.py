def rain():
    values = []
    while True:
        line = input("Rainfall (-999 to finish): ")
        if line == "-999":
            break
        try:
            value = float(line)
        except ValueError:
            continue
        if value < 0:
            continue
        values.append(value)
    count = len(values)
    total = 0
    for v in values:
        total += v
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
