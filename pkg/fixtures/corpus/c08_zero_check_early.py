def rain():
    total = 0
    count = 0
    while True:
        line = input("Rain in mm (-999 ends input): ")
        if line == "-999":
            break
        try:
            value = float(line)
        except ValueError:
            continue
        if value < 0:
            continue
        total += value
        count += 1
    if count == 0:
        return 0
    return total / count

if __name__ == "__main__":
    print(rain())
